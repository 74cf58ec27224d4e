#include "cvx/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "cvx/errors.hpp"
#include "cvx/support_geometry.hpp"

namespace cvx {

std::vector<Vec3> reflection_directions(int n, std::uint64_t seed) {
    std::vector<Vec3> dirs;
    dirs.push_back({1, 0, 0});
    dirs.push_back({-1, 0, 0});
    dirs.push_back({0, 1, 0});
    dirs.push_back({0, -1, 0});
    if (n == 2) {
        dirs.push_back({0, 0, 1});
        dirs.push_back({0, 0, -1});
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    if (n == 1) {
        std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
        for (int j = 0; j < 8; ++j) {
            const double a = ang(rng);
            dirs.push_back({std::cos(a), std::sin(a), 0.0});
        }
    } else {
        std::normal_distribution<double> nrm;
        for (int j = 0; j < 8; ++j) {
            Vec3 v{nrm(rng), nrm(rng), nrm(rng)};
            double m = norm(v);
            while (m < 1e-6) {
                v = {nrm(rng), nrm(rng), nrm(rng)};
                m = norm(v);
            }
            dirs.push_back((1.0 / m) * v);
        }
    }
    return dirs;
}

double reflection_halfwidth(const SphereGrid& g, std::span<const double> s,
                            const std::vector<Vec3>& X, const Vec3& zdir,
                            double tol) {
    if (s.size() != g.count || X.size() != g.count)
        throw GridMismatch("reflection inputs do not match the grid");
    const std::size_t N = g.count;
    // Candidate test directions: only w with z.w < 0 can be violated.
    std::vector<std::size_t> wi;
    std::vector<double> zw;
    wi.reserve(N / 2);
    zw.reserve(N / 2);
    for (std::size_t j = 0; j < N; ++j) {
        const double c = dot(zdir, g.node[j]);
        if (c < 0) {
            wi.push_back(j);
            zw.push_back(c);
        }
    }
    // Boundary points in descending height: once the running offset reaches
    // the current height, no later point can raise it.
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> pz(N);
    for (std::size_t i = 0; i < N; ++i) pz[i] = dot(X[i], zdir);
    std::sort(order.begin(), order.end(),
              [&pz](std::size_t a, std::size_t b) { return pz[a] > pz[b]; });

    double lambda = -std::numeric_limits<double>::infinity();
    for (std::size_t oi = 0; oi < N; ++oi) {
        const std::size_t i = order[oi];
        const double h = pz[i];
        if (h <= lambda) break;
        const Vec3& p = X[i];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t jj = 0; jj < wi.size(); ++jj) {
            const double c = zw[jj];
            const std::size_t j = wi[jj];
            const double lam =
                (s[j] + tol - dot(p, g.node[j]) + 2.0 * h * c) / (2.0 * c);
            const double cand = std::min(h, lam);
            if (cand > best) {
                best = cand;
                if (best >= h) break;
            }
        }
        lambda = std::max(lambda, best);
    }
    return lambda;
}

double interp_error_estimate(const SphereGrid& g, std::span<const double> s,
                             const SymField& tau) {
    if (s.size() != g.count || tau.a11.size() != g.count)
        throw GridMismatch("interpolation estimate inputs do not match the grid");
    const std::size_t N = g.count;
    double worst = 0;
    const double* sv = s.data();
    const double* a11 = tau.a11.data();
    if (g.dim == 1) {
#pragma omp parallel for schedule(static) reduction(max : worst) \
    if (N >= omp_grain)
        for (std::size_t i = 0; i < N; ++i) {
            const double h = g.dtheta;
            worst = std::max(worst, h * h * std::abs(a11[i] - sv[i]));
        }
    } else {
        const double* a12 = tau.a12.data();
        const double* a22 = tau.a22.data();
#pragma omp parallel for schedule(static) reduction(max : worst) \
    if (N >= omp_grain)
        for (std::size_t i = 0; i < N; ++i) {
            const double h = g.hloc[g.row(i)];
            const double hess = std::abs(a11[i] - sv[i]) + 2.0 * std::abs(a12[i]) +
                                std::abs(a22[i] - sv[i]);
            worst = std::max(worst, h * h * hess);
        }
    }
    return 0.125 * worst;
}

TsoReport tso_monitor(const SphereGrid& g, std::span<const double> s,
                      std::span<const double> speed, const Vec3& inball_center,
                      double rho_minus) {
    if (s.size() != g.count || speed.size() != g.count)
        throw GridMismatch("monitor inputs do not match the grid");
    const double c = 0.25 * rho_minus;
    double W = -std::numeric_limits<double>::infinity();
    double umin = std::numeric_limits<double>::infinity();
    const std::size_t N = g.count;
#pragma omp parallel for schedule(static) reduction(max : W) \
    reduction(min : umin) if (N >= omp_grain)
    for (std::size_t i = 0; i < N; ++i) {
        const double u = s[i] - dot(inball_center, g.node[i]);
        umin = std::min(umin, u);
        W = std::max(W, speed[i] / (u - c));
    }
    return {W, c, umin - c - 0.75 * rho_minus};
}

ConvergenceResiduals convergence_residuals(const SphereGrid& g,
                                           std::span<const double> s,
                                           const Quermass& Q, int k,
                                           double ek_min, double ek_max) {
    const BallDeviation bd = ball_deviation(g, s);
    const double mean_ek = Q.V[g.dim - k] / Q.V[g.dim];
    return {bd.dev, bd.rhat,
            std::max(std::abs(ek_max - mean_ek), std::abs(mean_ek - ek_min))};
}

DiagRecord make_record(const SnapshotView& v, const std::vector<Vec3>& dirs,
                       bool full) {
    const SphereGrid& g = *v.g;
    DiagRecord rec;
    rec.t = v.t;
    rec.step = v.step;
    rec.full = full;
    rec.n = g.dim;
    rec.Q = v.Q;
    for (int j = 1; j <= g.dim + 1; ++j) rec.r[j - 1] = j_radius(v.Q, j);
    rec.I_iso = iso_ratio(v.Q, g.dim + 1 - v.k);
    rec.I_1 = iso_ratio(v.Q, 1);
    rec.S = stability_pair(v.Q);
    rec.phi = v.phi;
    rec.ek_min = v.ek_min;
    rec.ek_max = v.ek_max;
    rec.ek_wmin = v.ek_wmin;
    rec.ek_wmax = v.ek_wmax;
    rec.budget = v.budget;
    const BallDeviation bd = ball_deviation(g, *v.s);
    rec.steiner = bd.steiner;
    rec.rhat = bd.rhat;
    rec.d_ball = bd.dev;
    const double mean_ek = v.Q.V[g.dim - v.k] / v.Q.V[g.dim];
    rec.ekflat = std::max(std::abs(v.ek_max - mean_ek),
                          std::abs(mean_ek - v.ek_min));
    if (!full) return rec;

    const std::vector<Vec3> X = embed_boundary(g, *v.s);
    const Inball ib = inball_subgradient(g, *v.s);
    rec.rho_minus = ib.radius;
    rec.inball_center = ib.center;
    Vec3 cbest;
    rec.rho_plus = circumradius_certified(X, {bd.steiner, ib.center}, &cbest);
    rec.interp_err = interp_error_estimate(g, *v.s, *v.tau);
    rec.tol_contain = 5.0 * rec.interp_err;
    rec.lam_plus.resize(dirs.size());
    rec.lam_minus.resize(dirs.size());
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        rec.lam_plus[j] =
            reflection_halfwidth(g, *v.s, X, dirs[j], rec.tol_contain);
        const Vec3 neg = -1.0 * dirs[j];
        rec.lam_minus[j] =
            -reflection_halfwidth(g, *v.s, X, neg, rec.tol_contain);
    }
    if (v.speed) {
        const TsoReport ts = tso_monitor(g, *v.s, *v.speed, ib.center, ib.radius);
        rec.tso_W = ts.W;
        rec.tso_c = ts.c;
        rec.tso_min_margin = ts.min_margin;
        if (std::isfinite(v.alpha)) {
            const double a = v.alpha, c = ts.c;
            rec.tso_bound_static =
                std::pow(2.0 * (1.0 + a) / a, a) * std::pow(c, -(a + 1.0));
            rec.tso_bound_decay =
                v.t > 0 ? std::pow(2.0 / (1.0 + a), a / (1.0 + a)) / c *
                              std::pow(v.t, -a / (1.0 + a))
                        : std::numeric_limits<double>::infinity();
        }
    }
    return rec;
}

MonotonicityReport monotonicity_report(const Trajectory& traj) {
    MonotonicityReport rep;
    if (traj.rec.size() < 2)
        throw InvalidConfig("monotonicity audit needs at least two records");
    const int n = traj.n, k = traj.k;
    rep.worst_vol = rep.worst_quer = rep.worst_iso =
        -std::numeric_limits<double>::infinity();
    auto note = [&rep](const char* what, double excess, double t) {
        if (rep.violations.size() >= 16) return;
        std::ostringstream msg;
        msg.precision(6);
        msg << what << " violated by " << excess << " at t = " << t;
        rep.violations.push_back(msg.str());
    };
    for (std::size_t i = 1; i < traj.rec.size(); ++i) {
        const DiagRecord& a = traj.rec[i - 1];
        const DiagRecord& b = traj.rec[i];
        const double tol_v = b.budget + 1e-12 * std::abs(b.Q.V[n + 1]);
        const double tol_q = b.budget + 1e-12 * std::abs(b.Q.V[n + 1 - k]);
        const double tol_i = b.budget + 1e-12 * std::abs(b.I_iso);
        const double viol_vol = -(b.Q.V[n + 1] - a.Q.V[n + 1]) - tol_v;
        const double viol_quer = (b.Q.V[n + 1 - k] - a.Q.V[n + 1 - k]) - tol_q;
        const double viol_iso = (b.I_iso - a.I_iso) - tol_i;
        if (viol_vol > rep.worst_vol) {
            rep.worst_vol = viol_vol;
            rep.t_worst_vol = b.t;
        }
        if (viol_quer > rep.worst_quer) {
            rep.worst_quer = viol_quer;
            rep.t_worst_quer = b.t;
        }
        if (viol_iso > rep.worst_iso) {
            rep.worst_iso = viol_iso;
            rep.t_worst_iso = b.t;
        }
        if (viol_vol > 0) note("enclosed-volume monotonicity", viol_vol, b.t);
        if (viol_quer > 0) note("quermassintegral monotonicity", viol_quer, b.t);
        if (viol_iso > 0) note("isoperimetric-ratio monotonicity", viol_iso, b.t);
    }
    rep.pass = rep.violations.empty();
    return rep;
}

} // namespace cvx
