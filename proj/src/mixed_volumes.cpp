#include "cvx/mixed_volumes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cvx/errors.hpp"

namespace cvx {

namespace {

void check_size(const SphereGrid& g, std::size_t have, const char* what) {
    if (have != g.count) {
        std::ostringstream msg;
        msg << what << " has " << have << " nodes, grid has " << g.count;
        throw GridMismatch(msg.str());
    }
}

} // namespace

Quermass quermassintegrals_shifted(const SphereGrid& g, std::span<const double> s,
                                   const RadiiField& r, double delta) {
    check_size(g, s.size(), "support field");
    check_size(g, r.r1.size(), "radii field");
    Quermass q;
    q.n = g.dim;
    q.V[0] = g.omega();
    const double* sv = s.data();
    const double* r1 = r.r1.data();
    const double* w = g.w.data();
    const std::size_t n = g.count;
    if (g.dim == 1) {
        double v1 = 0, v2 = 0;
#pragma omp parallel for schedule(static) reduction(+ : v1, v2) \
    if (n >= omp_grain)
        for (std::size_t i = 0; i < n; ++i) {
            const double a = r1[i] + delta;
            v1 += w[i] * a;
            v2 += w[i] * (sv[i] + delta) * a;
        }
        q.V[1] = v1;
        q.V[2] = v2;
        return q;
    }
    const double* r2 = r.r2.data();
    double v1 = 0, v2 = 0, v3 = 0;
#pragma omp parallel for schedule(static) reduction(+ : v1, v2, v3) \
    if (n >= omp_grain)
    for (std::size_t i = 0; i < n; ++i) {
        const double a = r1[i] + delta, b = r2[i] + delta;
        const double det = a * b;
        v1 += w[i] * 0.5 * (a + b);
        v2 += w[i] * det;
        v3 += w[i] * (sv[i] + delta) * det;
    }
    q.V[1] = v1;
    q.V[2] = v2;
    q.V[3] = v3;
    return q;
}

Quermass quermassintegrals(const SphereGrid& g, std::span<const double> s,
                           const RadiiField& r) {
    return quermassintegrals_shifted(g, s, r, 0.0);
}

double j_radius(const Quermass& q, int j) {
    if (j < 1 || j > q.n + 1) throw InvalidConfig("mean radius index out of range");
    const double ratio = q.V[j] / (q.n == 1 ? 2.0 : 4.0) / std::numbers::pi;
    return std::pow(ratio, 1.0 / j);
}

double iso_ratio(const Quermass& q, int ell) {
    if (ell < 1 || ell > q.n) throw InvalidConfig("isoperimetric index out of range");
    const int np1 = q.n + 1;
    return std::pow(q.V[ell], np1) /
           (std::pow(q.V[0], np1 - ell) * std::pow(q.V[np1], ell));
}

double stability_pair(const Quermass& q) {
    return q.V[1] * q.V[1] - q.V[0] * q.V[2];
}

AfReport af_audit(const Quermass& q) {
    AfReport rep;
    const int np1 = q.n + 1;
    const double omega = q.V[0];
    auto push = [&rep](std::string label, double value, double scale) {
        rep.residuals.push_back({std::move(label), value, scale});
    };
    // Consecutive log-concavity of the sequence V_0..V_{n+1}.
    for (int j = 1; j <= q.n; ++j) {
        const int mid = np1 - j;
        const double lhs = q.V[mid] * q.V[mid];
        const double rhs = q.V[mid - 1] * q.V[mid + 1];
        std::ostringstream lb;
        lb << "V" << mid << "^2 >= V" << mid - 1 << " V" << mid + 1;
        push(lb.str(), lhs - rhs, lhs + std::abs(rhs));
    }
    // Sphere-normalized chain V_{n+1-j}^(n+1-i) >= omega^(j-i) V_{n+1-i}^(n+1-j).
    for (int i = 0; i < np1; ++i) {
        for (int j = i + 1; j < np1; ++j) {
            const double lhs = std::pow(q.V[np1 - j], np1 - i);
            const double rhs =
                std::pow(omega, j - i) * std::pow(q.V[np1 - i], np1 - j);
            std::ostringstream lb;
            lb << "V" << np1 - j << "^" << np1 - i << " >= omega^" << j - i << " V"
               << np1 - i << "^" << np1 - j;
            push(lb.str(), lhs - rhs, lhs + std::abs(rhs));
        }
    }
    rep.worst_normalized = 0;
    bool first = true;
    for (const auto& res : rep.residuals) {
        const double nrm = res.value / res.scale;
        if (first || nrm < rep.worst_normalized) rep.worst_normalized = nrm;
        first = false;
    }
    return rep;
}

double diskant_inradius_bound(const Quermass& q) {
    const double rn = j_radius(q, q.n);
    const double rn1 = j_radius(q, q.n + 1);
    const double sigma = rn / rn1;
    const double excess = std::max(std::pow(sigma, q.n + 1) - 1.0, 0.0);
    return rn1 * (sigma - std::pow(excess, 1.0 / (q.n + 1)));
}

Vec3 steiner_point(const SphereGrid& g, std::span<const double> s) {
    check_size(g, s.size(), "support field");
    const double* sv = s.data();
    const double* w = g.w.data();
    const std::size_t n = g.count;
    double px = 0, py = 0, pz = 0;
#pragma omp parallel for schedule(static) reduction(+ : px, py, pz) \
    if (n >= omp_grain)
    for (std::size_t i = 0; i < n; ++i) {
        const double c = sv[i] * w[i];
        px += c * g.node[i].x;
        py += c * g.node[i].y;
        pz += c * g.node[i].z;
    }
    const double scale = (g.dim + 1) / g.omega();
    return {px * scale, py * scale, pz * scale};
}

namespace {

double support_margin(const SphereGrid& g, const double* s, const Vec3& p) {
    double m = s[0] - dot(p, g.node[0]);
    const std::size_t n = g.count;
#pragma omp parallel for schedule(static) reduction(min : m) if (n >= omp_grain)
    for (std::size_t i = 1; i < n; ++i)
        m = std::min(m, s[i] - dot(p, g.node[i]));
    return m;
}

} // namespace

Inball inball_subgradient(const SphereGrid& g, std::span<const double> s) {
    check_size(g, s.size(), "support field");
    const double* sv = s.data();
    Vec3 p = steiner_point(g, s);
    double f = support_margin(g, sv, p);
    const double rhat = mean_value(g, s);
    double step = 0.5 * rhat;
    int it = 0;
    for (; it < 200 && step > 1e-12 * rhat; ++it) {
        // Mean inward normal over the near-active constraints.
        Vec3 d{};
        std::size_t na = 0;
        const double cut = f + 0.5 * step;
        for (std::size_t i = 0; i < g.count; ++i) {
            if (sv[i] - dot(p, g.node[i]) <= cut) {
                d -= g.node[i];
                ++na;
            }
        }
        const double dn = norm(d);
        if (na == 0 || dn < 1e-14) {
            step *= 0.5;
            continue;
        }
        const Vec3 trial = p + (step / dn) * d;
        const double ft = support_margin(g, sv, trial);
        if (ft > f) {
            p = trial;
            f = ft;
        } else {
            step *= 0.5;
        }
    }
    return {p, f, it};
}

double circumradius_certified(const std::vector<Vec3>& X,
                              const std::vector<Vec3>& centers, Vec3* best) {
    double rbest = std::numeric_limits<double>::infinity();
    for (const Vec3& c : centers) {
        double r2 = 0;
        const std::size_t n = X.size();
#pragma omp parallel for schedule(static) reduction(max : r2) if (n >= omp_grain)
        for (std::size_t i = 0; i < n; ++i)
            r2 = std::max(r2, norm2(X[i] - c));
        const double r = std::sqrt(r2);
        if (r < rbest) {
            rbest = r;
            if (best) *best = c;
        }
    }
    return rbest;
}

double hausdorff(const SphereGrid& g, std::span<const double> s1,
                 std::span<const double> s2) {
    check_size(g, s1.size(), "support field");
    check_size(g, s2.size(), "support field");
    double d = 0;
    const std::size_t n = g.count;
#pragma omp parallel for schedule(static) reduction(max : d) if (n >= omp_grain)
    for (std::size_t i = 0; i < n; ++i)
        d = std::max(d, std::abs(s1[i] - s2[i]));
    return d;
}

BallDeviation ball_deviation(const SphereGrid& g, std::span<const double> s) {
    BallDeviation out;
    out.steiner = steiner_point(g, s);
    const double* sv = s.data();
    const double* w = g.w.data();
    const std::size_t n = g.count;
    const Vec3 p = out.steiner;
    double acc = 0;
#pragma omp parallel for schedule(static) reduction(+ : acc) if (n >= omp_grain)
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (sv[i] - dot(p, g.node[i]));
    out.rhat = acc / g.omega();
    double dev = 0;
#pragma omp parallel for schedule(static) reduction(max : dev) if (n >= omp_grain)
    for (std::size_t i = 0; i < n; ++i)
        dev = std::max(dev, std::abs(sv[i] - dot(p, g.node[i]) - out.rhat));
    out.dev = dev;
    return out;
}

namespace ref {

Quermass quermassintegrals(const SphereGrid& g, std::span<const double> s,
                           const RadiiField& r) {
    check_size(g, s.size(), "support field");
    Quermass q;
    q.n = g.dim;
    q.V[0] = g.omega();
    for (std::size_t i = 0; i < g.count; ++i) {
        if (g.dim == 1) {
            q.V[1] += g.w[i] * r.r1[i];
            q.V[2] += g.w[i] * s[i] * r.r1[i];
        } else {
            const double det = r.r1[i] * r.r2[i];
            q.V[1] += g.w[i] * 0.5 * (r.r1[i] + r.r2[i]);
            q.V[2] += g.w[i] * det;
            q.V[3] += g.w[i] * s[i] * det;
        }
    }
    return q;
}

} // namespace ref

} // namespace cvx
