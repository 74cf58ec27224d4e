#include "cvx/flow.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvx/errors.hpp"

namespace cvx {

// ---------------------------------------------------------------------------
// speed

SpeedSpec SpeedSpec::power(int k, double alpha) {
    if (alpha <= 0) throw InvalidConfig("speed exponent alpha must be positive");
    SpeedSpec s;
    s.k = k;
    s.homogeneous = true;
    s.alpha = alpha;
    return s;
}

SpeedSpec SpeedSpec::from_catalog(int k, const std::string& name) {
    SpeedSpec s;
    s.k = k;
    s.homogeneous = false;
    std::string id = name;
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (id == "z+z^3" || id == "cubic") {
        s.mu_name = "z+z^3";
        s.mu = [](double z) { return z + z * z * z; };
        s.mu_d = [](double z) { return 1.0 + 3.0 * z * z; };
    } else if (id == "expm1" || id == "exp(z)-1") {
        s.mu_name = "expm1";
        s.mu = [](double z) { return std::expm1(z); };
        s.mu_d = [](double z) { return std::exp(z); };
    } else {
        throw InvalidConfig("unknown speed function '" + name + "'");
    }
    return s;
}

MuProbe probe_mu(const SpeedSpec& spec) {
    MuProbe out;
    auto mu = [&](double z) {
        return spec.homogeneous ? std::pow(z, spec.alpha) : spec.mu(z);
    };
    auto mud = [&](double z) {
        return spec.homogeneous ? spec.alpha * std::pow(z, spec.alpha - 1.0)
                                : spec.mu_d(z);
    };
    auto warn = [&out](const std::string& msg) {
        out.pass = false;
        out.warnings.push_back(msg);
    };
    constexpr int M = 161;
    double prev_ratio2 = -std::numeric_limits<double>::infinity();
    bool pos_ok = true, slope_ok = true, convex_ok = true, incr_ok = true;
    double bad_pos = 0, bad_slope = 0, bad_convex = 0, bad_incr = 0;
    double right_ratio2 = 0, left_ratio1 = 0;
    for (int j = 0; j < M; ++j) {
        const double z = 1e-4 * std::pow(10.0, 8.0 * j / (M - 1));
        const double f = mu(z), fd = mud(z);
        if (pos_ok && (!std::isfinite(f) || f <= 0)) {
            pos_ok = false;
            bad_pos = z;
        }
        if (slope_ok && (!std::isfinite(fd) || fd <= 0)) {
            slope_ok = false;
            bad_slope = z;
        }
        const double h = 1e-5;
        const double fdd = (mud(z * (1 + h)) - mud(z * (1 - h))) / (2 * z * h);
        const double comb = z * fdd + 2 * fd;
        if (convex_ok &&
            (!std::isfinite(comb) || comb < -1e-3 * std::abs(fd) - 1e-12)) {
            convex_ok = false;
            bad_convex = z;
        }
        const double ratio2 = z * z * fd / f;
        if (incr_ok && (!std::isfinite(ratio2) ||
                        ratio2 < prev_ratio2 * (1.0 - 1e-9) - 1e-12)) {
            incr_ok = false;
            bad_incr = z;
        }
        prev_ratio2 = std::isfinite(ratio2) ? ratio2 : prev_ratio2;
        if (j == M - 1) right_ratio2 = ratio2;
        if (j == 0) left_ratio1 = z * fd / f;
    }
    std::ostringstream msg;
    msg.precision(3);
    if (!pos_ok) {
        msg.str("");
        msg << "mu not finite and positive at z = " << bad_pos;
        warn(msg.str());
    }
    if (!slope_ok) {
        msg.str("");
        msg << "mu' not finite and positive at z = " << bad_slope;
        warn(msg.str());
    }
    if (!convex_ok) {
        msg.str("");
        msg << "z mu'' + 2 mu' < 0 near z = " << bad_convex;
        warn(msg.str());
    }
    if (!incr_ok) {
        msg.str("");
        msg << "z^2 mu'/mu not increasing near z = " << bad_incr;
        warn(msg.str());
    }
    if (!(right_ratio2 >= 100.0)) {
        msg.str("");
        msg << "z^2 mu'/mu = " << right_ratio2 << " at the right end (< 100)";
        warn(msg.str());
    }
    if (!(std::isfinite(left_ratio1) && left_ratio1 <= 100.0)) {
        msg.str("");
        msg << "z mu'/mu = " << left_ratio1 << " at the left end (unbounded)";
        warn(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// constraint

ConstraintSpec ConstraintSpec::volume() {
    ConstraintSpec c;
    c.kind = ConstraintKind::Volume;
    return c;
}

ConstraintSpec ConstraintSpec::quermass() {
    ConstraintSpec c;
    c.kind = ConstraintKind::Quermass;
    return c;
}

ConstraintSpec ConstraintSpec::general(double theta) {
    if (theta < 0 || theta > 1)
        throw InvalidConfig("constraint exponent theta must lie in [0, 1]");
    ConstraintSpec c;
    c.kind = ConstraintKind::GeneralTheta;
    c.theta = theta;
    return c;
}

ConstraintSpec ConstraintSpec::external(double scale) {
    ConstraintSpec c;
    c.kind = ConstraintKind::External;
    c.external_scale = scale;
    return c;
}

namespace {

double g_value(const ConstraintSpec& cs, double a, double b) {
    if (cs.G) return cs.G(a, b);
    switch (cs.kind) {
    case ConstraintKind::Volume: return b;
    case ConstraintKind::Quermass: return a;
    case ConstraintKind::GeneralTheta:
        return std::pow(a, cs.theta) * std::pow(b, 1.0 - cs.theta);
    default: return diag_nan;
    }
}

void g_partials(const ConstraintSpec& cs, double a, double b, double& ga,
                double& gb) {
    if (cs.Ga || cs.Gb) {
        ga = cs.Ga ? cs.Ga(a, b) : 0.0;
        gb = cs.Gb ? cs.Gb(a, b) : 0.0;
    } else {
        switch (cs.kind) {
        case ConstraintKind::Volume: ga = 0.0; gb = 1.0; break;
        case ConstraintKind::Quermass: ga = 1.0; gb = 0.0; break;
        case ConstraintKind::GeneralTheta:
            ga = cs.theta * std::pow(b / a, 1.0 - cs.theta);
            gb = (1.0 - cs.theta) * std::pow(a / b, cs.theta);
            break;
        default: ga = gb = 0.0; break;
        }
    }
    if (!(ga >= 0.0) || !(gb >= 0.0) || !(ga + gb > 0.0)) {
        std::ostringstream msg;
        msg << "constraint derivative degenerate at (a, b) = (" << a << ", " << b
            << "): G_a = " << ga << ", G_b = " << gb;
        throw DegenerateConstraint(msg.str());
    }
}

inline void radii_of(int dim, double a11, double a12, double a22, double& r1,
                     double& r2) {
    if (dim == 1) {
        r1 = a11;
        r2 = 0.0;
        return;
    }
    const double m = 0.5 * (a11 + a22);
    const double d = std::hypot(0.5 * (a11 - a22), a12);
    r1 = m - d;
    r2 = m + d;
}

} // namespace

// ---------------------------------------------------------------------------
// shift polynomials: quermassintegrals of s + delta in closed form

struct FlowEngine::ShiftPoly {
    int n = 1;
    double omega = 0; // analytic sphere measure (reported V_0)
    double W0 = 0;    // quadrature measure sum w
    double V1 = 0, V2 = 0, V3 = 0;
    double S1 = 0; // integral of s
    double T1 = 0; // integral of s (r1 + r2), n = 2 only

    Quermass eval(double d) const {
        Quermass q;
        q.n = n;
        q.V[0] = omega;
        if (n == 1) {
            q.V[1] = V1 + d * W0;
            q.V[2] = V2 + d * (S1 + V1) + d * d * W0;
        } else {
            q.V[1] = V1 + d * W0;
            q.V[2] = V2 + 2.0 * d * V1 + d * d * W0;
            q.V[3] = V3 + d * (T1 + V2) + d * d * (S1 + 2.0 * V1) +
                     d * d * d * W0;
        }
        return q;
    }

    double slope(int j, double d) const { // dV_j/ddelta
        if (j == 1) return W0;
        if (n == 1) return S1 + V1 + 2.0 * d * W0; // j == 2
        if (j == 2) return 2.0 * V1 + 2.0 * d * W0;
        return T1 + V2 + 2.0 * d * (S1 + 2.0 * V1) + 3.0 * d * d * W0; // j == 3
    }
};

// ---------------------------------------------------------------------------
// engine

FlowEngine::FlowEngine(const SphereGrid& g, FlowParams params, ScalarField s0)
    : g_(g), p_(std::move(params)), s_(std::move(s0)) {
    if (s_.size() != g_.count)
        throw GridMismatch("initial support field does not match the grid");
    const int k = p_.speed.k;
    if (k < 1 || k > g_.dim)
        throw InvalidConfig("curvature order k must lie in [1, n]");
    if (p_.speed.homogeneous && !(p_.speed.alpha > 0))
        throw InvalidConfig("speed exponent alpha must be positive");
    if (!(p_.cfl > 0) || p_.cfl >= 0.5)
        throw InvalidConfig("cfl must lie in (0, 0.5)");
    if (!(p_.tol_conv > 0)) throw InvalidConfig("tol_conv must be positive");
    const bool external = p_.constraint.kind == ConstraintKind::External;
    if (external && p_.projection)
        throw InvalidConfig(
            "projection requires a conserved constraint; disable it in external "
            "forcing mode");
    psi_.assign(g_.count, 0.0);
    refresh_geometry(); // throws NonConvexInput on bad initial data
    if (external) {
        c0_ = diag_nan;
    } else {
        c0_ = g_value(p_.constraint, j_radius(Q_, g_.dim + 1 - k),
                      j_radius(Q_, g_.dim + 1));
    }
    ek_wmin_ = std::numeric_limits<double>::infinity();
    ek_wmax_ = -std::numeric_limits<double>::infinity();
}

void FlowEngine::refresh_geometry() {
    const std::size_t N = g_.count;
    tau_.resize(N, g_.dim);
    radii_.resize(N, g_.dim);
    const double* f = s_.data();
    double* ta11 = tau_.a11.data();
    double* r1v = radii_.r1.data();
    double v1 = 0, v2 = 0, v3 = 0, s1 = 0, t1 = 0, w0 = 0;
    double rmn = std::numeric_limits<double>::infinity();
    double rmx = -std::numeric_limits<double>::infinity();
    if (g_.dim == 1) {
#pragma omp parallel for schedule(static)                                     \
    reduction(+ : v1, v2, s1, w0) reduction(min : rmn) reduction(max : rmx)   \
    if (N >= omp_grain)
        for (std::size_t i = 0; i < N; ++i) {
            const LocalJet j = detail::jet1(g_, f, i);
            const double tau = j.h11 + j.f;
            ta11[i] = tau;
            r1v[i] = tau;
            const double w = g_.w[i];
            v1 += w * tau;
            v2 += w * j.f * tau;
            s1 += w * j.f;
            w0 += w;
            rmn = std::min(rmn, tau);
            rmx = std::max(rmx, tau);
        }
    } else {
        double* ta12 = tau_.a12.data();
        double* ta22 = tau_.a22.data();
        double* r2v = radii_.r2.data();
#pragma omp parallel for schedule(static)                                     \
    reduction(+ : v1, v2, v3, s1, t1, w0) reduction(min : rmn)                \
    reduction(max : rmx) if (N >= omp_grain)
        for (std::size_t i = 0; i < N; ++i) {
            const LocalJet j = detail::jet2(g_, f, i);
            const double a11 = j.h11 + j.f, a12 = j.h12, a22 = j.h22 + j.f;
            ta11[i] = a11;
            ta12[i] = a12;
            ta22[i] = a22;
            double r1, r2;
            radii_of(2, a11, a12, a22, r1, r2);
            r1v[i] = r1;
            r2v[i] = r2;
            const double w = g_.w[i];
            const double det = r1 * r2, tr = r1 + r2;
            v1 += w * 0.5 * tr;
            v2 += w * det;
            v3 += w * j.f * det;
            s1 += w * j.f;
            t1 += w * j.f * tr;
            w0 += w;
            rmn = std::min(rmn, r1);
            rmx = std::max(rmx, r2);
        }
    }
    W0_ = w0;
    S1_ = s1;
    T1_ = t1;
    rmin_ = rmn;
    rmax_ = rmx;
    Q_.n = g_.dim;
    Q_.V[0] = g_.omega();
    Q_.V[1] = v1;
    Q_.V[2] = v2;
    Q_.V[3] = g_.dim == 2 ? v3 : 0.0;
    const double eps = 1e-8 * (s1 / w0);
    if (!(rmn > eps)) {
        std::ostringstream msg;
        msg << (step_ == 0 ? "initial data is not strictly convex"
                           : "evolving surface lost strict convexity")
            << ": min principal radius " << rmn << " <= margin " << eps;
        if (step_ == 0) throw NonConvexInput(msg.str());
        throw LossOfConvexity(msg.str());
    }
    phi_fresh_ = false;
}

double FlowEngine::phi_from_caches() {
    const std::size_t N = g_.count;
    const int n = g_.dim, k = p_.speed.k;
    const double* r1v = radii_.r1.data();
    const double* r2v = n == 2 ? radii_.r2.data() : nullptr;
    double* psi = psi_.data();
    const SpeedSpec& sp = p_.speed;
    double ipsi = 0, iek = 0, maxsp = 0;
    double dtmin = std::numeric_limits<double>::infinity();
    double ekmn = std::numeric_limits<double>::infinity();
    double ekmx = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(+ : ipsi, iek)            \
    reduction(min : dtmin, ekmn) reduction(max : maxsp, ekmx)                 \
    if (N >= omp_grain)
    for (std::size_t i = 0; i < N; ++i) {
        double ek, F, sigma, enk, kap2F; // kap2F = max_j kappa_j^2 dF/dkappa_j
        if (n == 1) {
            const double r = r1v[i];
            ek = 1.0 / r;
            F = ek;
            sigma = r;
            enk = 1.0;
            kap2F = ek * ek;
        } else {
            const double r1 = r1v[i], r2 = r2v[i];
            const double det = r1 * r2;
            sigma = det;
            const double kmax = 1.0 / r1;
            if (k == 1) {
                ek = (r1 + r2) / (2.0 * det);
                F = ek;
                enk = 0.5 * (r1 + r2);
                kap2F = 0.5 * kmax * kmax;
            } else {
                ek = 1.0 / det;
                F = std::sqrt(ek);
                enk = 1.0;
                kap2F = 0.5 * F * kmax;
            }
        }
        const double v = sp.value(F);
        psi[i] = v;
        ipsi += g_.w[i] * sigma * v;
        iek += g_.w[i] * enk * v;
        const double D = sp.slope(F) * kap2F;
        const double h = g_.spacing(i);
        dtmin = std::min(dtmin, h * h / D);
        maxsp = std::max(maxsp, std::abs(v));
        ekmn = std::min(ekmn, ek);
        ekmx = std::max(ekmx, ek);
    }
    max_speed_ = maxsp;
    dt_stable_ = p_.cfl * dtmin;
    ek_min_ = ekmn;
    ek_max_ = ekmx;

    const ConstraintSpec& cs = p_.constraint;
    const double lo = ipsi / Q_.V[n];
    double phi;
    if (cs.kind == ConstraintKind::External) {
        phi = cs.external_phi ? cs.external_phi(t_, lo) : cs.external_scale * lo;
        if (!(phi >= lo * (1.0 - 1e-12))) {
            std::ostringstream msg;
            msg << "external forcing " << phi
                << " below the mean speed " << lo << " at t = " << t_;
            throw ConstraintViolation(msg.str());
        }
        sandwich_lo_ = lo;
        sandwich_hi_ = diag_nan;
        return phi;
    }
    const double hi = iek / Q_.V[n - k];
    switch (cs.kind) {
    case ConstraintKind::Volume: phi = lo; break;
    case ConstraintKind::Quermass: phi = hi; break;
    default: {
        const double a = j_radius(Q_, n + 1 - k);
        const double b = j_radius(Q_, n + 1);
        double ga, gb;
        g_partials(cs, a, b, ga, gb);
        const int m = n + 1 - k;
        const double omega = g_.omega();
        const double wa =
            ga * std::pow(omega, -1.0 / m) * std::pow(Q_.V[m], (1.0 - m) / m);
        const double wb = gb * std::pow(omega, -1.0 / (n + 1)) *
                          std::pow(Q_.V[n + 1], -double(n) / (n + 1));
        phi = (wa * iek + wb * ipsi) / (wa * Q_.V[n - k] + wb * Q_.V[n]);
        break;
    }
    }
    const double slack = 1e-10 * (std::abs(lo) + std::abs(hi));
    if (phi < lo - slack || phi > hi + slack) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "balancing term " << phi << " outside the mean-speed bracket ["
            << lo << ", " << hi << "] at t = " << t_;
        note_failure(msg.str());
    }
    sandwich_lo_ = lo;
    sandwich_hi_ = hi;
    return phi;
}

double FlowEngine::current_phi() {
    if (!phi_fresh_) {
        phi_ = phi_from_caches();
        phi_fresh_ = true;
    }
    return phi_;
}

double FlowEngine::stable_dt() {
    current_phi();
    return dt_stable_;
}

double FlowEngine::constraint_value() const {
    if (p_.constraint.kind == ConstraintKind::External) return diag_nan;
    return g_value(p_.constraint, j_radius(Q_, g_.dim + 1 - p_.speed.k),
                   j_radius(Q_, g_.dim + 1));
}

void FlowEngine::note_failure(const std::string& msg) {
    if (failures_.size() < 64) failures_.push_back(msg);
}

double FlowEngine::solve_projection(double bound) {
    const int n = g_.dim, k = p_.speed.k;
    ShiftPoly poly{n, g_.omega(), W0_, Q_.V[1], Q_.V[2],
                   n == 2 ? Q_.V[3] : 0.0, S1_, T1_};
    const ConstraintSpec& cs = p_.constraint;
    auto gfun = [&](double d) {
        const Quermass q = poly.eval(d);
        return g_value(cs, j_radius(q, n + 1 - k), j_radius(q, n + 1)) - c0_;
    };
    auto gslope = [&](double d) {
        const Quermass q = poly.eval(d);
        const int m = n + 1 - k;
        const double a = j_radius(q, m), b = j_radius(q, n + 1);
        double ga, gb;
        g_partials(cs, a, b, ga, gb);
        const double da = a / (m * q.V[m]) * poly.slope(m, d);
        const double db = b / ((n + 1) * q.V[n + 1]) * poly.slope(n + 1, d);
        return ga * da + gb * db;
    };
    double lo = -bound, hi = bound;
    double glo = gfun(lo), ghi = gfun(hi);
    if (!(glo <= 0.0) || !(ghi >= 0.0)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "constraint shift not bracketed within |delta| <= " << bound
            << " (G - c0 at ends: " << glo << ", " << ghi << ") at t = " << t_;
        throw ProjectionFailure(msg.str());
    }
    const double tol = 1e-16 * (std::abs(c0_) + 1.0);
    double x = std::clamp(prev_delta_, lo, hi);
    double gx = gfun(x);
    for (int it = 0; it < 100 && std::abs(gx) > tol; ++it) {
        if (gx > 0)
            hi = x;
        else
            lo = x;
        const double dg = gslope(x);
        double xn = dg > 0 ? x - gx / dg : 0.5 * (lo + hi);
        if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < 1e-18 * (1.0 + std::abs(xn))) {
            x = xn;
            break;
        }
        x = xn;
        gx = gfun(x);
    }
    if (std::abs(gx) > 1e-12 * (std::abs(c0_) + 1.0)) {
        std::ostringstream msg;
        msg << "constraint shift solve stalled: residual " << gx << " at t = " << t_;
        throw ProjectionFailure(msg.str());
    }
    return x;
}

StepInfo FlowEngine::advance(double dt_forced) {
    current_phi();
    const double dt = dt_forced > 0 ? dt_forced : dt_stable_;
    const double phi = phi_;
    StepInfo info;
    info.dt = dt;
    info.phi = phi;
    info.max_speed = max_speed_;
    info.sandwich_lo = sandwich_lo_;
    info.sandwich_hi = sandwich_hi_;
    info.budget = 10.0 * dt * dt * max_speed_ * max_speed_ * g_.omega();

    // fold the pre-step curvature extrema into the record window
    ek_wmin_ = std::min(ek_wmin_, ek_min_);
    ek_wmax_ = std::max(ek_wmax_, ek_max_);
    budget_acc_ += info.budget;

    const std::size_t N = g_.count;
    double* s = s_.data();
    const double* psi = psi_.data();
#pragma omp parallel for schedule(static) if (N >= omp_grain)
    for (std::size_t i = 0; i < N; ++i) s[i] += dt * (phi - psi[i]);
    t_ += dt;
    ++step_;

    refresh_geometry();

    if (p_.projection && p_.constraint.kind != ConstraintKind::External) {
        const double bound = 2.0 * dt * (std::abs(phi) + max_speed_) + 1e-30;
        const double delta = solve_projection(bound);
        if (delta != 0.0) {
            double* r1 = radii_.r1.data();
            double* a11 = tau_.a11.data();
            if (g_.dim == 1) {
#pragma omp parallel for schedule(static) if (N >= omp_grain)
                for (std::size_t i = 0; i < N; ++i) {
                    s[i] += delta;
                    r1[i] += delta;
                    a11[i] += delta;
                }
            } else {
                double* r2 = radii_.r2.data();
                double* a22 = tau_.a22.data();
#pragma omp parallel for schedule(static) if (N >= omp_grain)
                for (std::size_t i = 0; i < N; ++i) {
                    s[i] += delta;
                    r1[i] += delta;
                    r2[i] += delta;
                    a11[i] += delta;
                    a22[i] += delta;
                }
            }
            // shift the cached reductions along
            ShiftPoly poly{g_.dim, g_.omega(), W0_, Q_.V[1], Q_.V[2],
                           g_.dim == 2 ? Q_.V[3] : 0.0, S1_, T1_};
            const double t1_new =
                T1_ + delta * (2.0 * Q_.V[1]) + 2.0 * delta * S1_ +
                2.0 * delta * delta * W0_;
            Q_ = poly.eval(delta);
            S1_ += delta * W0_;
            T1_ = t1_new;
            rmin_ += delta;
            rmax_ += delta;
            const double eps = 1e-8 * (S1_ / W0_);
            if (!(rmin_ > eps)) {
                std::ostringstream msg;
                msg << "evolving surface lost strict convexity after the "
                       "constraint shift: min principal radius "
                    << rmin_ << " <= margin " << eps;
                throw LossOfConvexity(msg.str());
            }
            phi_fresh_ = false;
        }
        info.delta = delta;
        prev_delta_ = delta;
        const double drift =
            std::abs(constraint_value() - c0_) / (std::abs(c0_) + 1e-300);
        worst_drift_ = std::max(worst_drift_, drift);
    }
    return info;
}

DiagRecord FlowEngine::snapshot(bool full, const std::vector<Vec3>& dirs) {
    current_phi(); // fill psi and curvature extrema for this state
    SnapshotView v;
    v.g = &g_;
    v.t = t_;
    v.step = step_;
    v.k = p_.speed.k;
    v.s = &s_;
    v.tau = &tau_;
    v.radii = &radii_;
    v.speed = &psi_;
    v.Q = Q_;
    v.phi = phi_;
    v.ek_min = ek_min_;
    v.ek_max = ek_max_;
    v.ek_wmin = std::min(ek_wmin_, ek_min_);
    v.ek_wmax = std::max(ek_wmax_, ek_max_);
    v.budget = budget_acc_;
    v.alpha = p_.speed.homogeneous ? p_.speed.alpha : diag_nan;
    DiagRecord rec = make_record(v, dirs, full);
    rec.rmin = rmin_;
    rec.rmax = rmax_;
    // reset the window accumulators, seeded with the current state
    ek_wmin_ = ek_min_;
    ek_wmax_ = ek_max_;
    budget_acc_ = 0;
    if (full) {
        if (std::isfinite(rec.tso_min_margin) &&
            rec.tso_min_margin < -1e-12 * (std::abs(rec.rho_minus) + 1.0)) {
            std::ostringstream msg;
            msg << "curvature-over-support denominator margin " << rec.tso_min_margin
                << " negative at t = " << t_;
            note_failure(msg.str());
        }
        // reflection offsets of a nearly round body stay within the
        // square-root envelope of the ball deviation
        if (rec.d_ball < 0.05 * rec.rhat) {
            const double cap = 2.0 * std::sqrt(rec.d_ball * rec.rhat) +
                               rec.tol_contain + 1e-12;
            for (std::size_t j = 0; j < dirs.size(); ++j) {
                const double off = rec.lam_plus[j] - dot(rec.steiner, dirs[j]);
                if (off > cap) {
                    std::ostringstream msg;
                    msg.precision(6);
                    msg << "reflection offset " << off << " beyond envelope " << cap
                        << " (direction " << j << ") at t = " << t_;
                    note_failure(msg.str());
                    break;
                }
            }
        }
    }
    return rec;
}

RunResult FlowEngine::run() {
    RunResult out;
    out.traj.n = g_.dim;
    out.traj.k = p_.speed.k;
    out.traj.eps_quad = p_.eps_quad;
    out.traj.dirs = reflection_directions(g_.dim, p_.seed);
    failures_.clear();
    worst_drift_ = 0;
    ek_wmin_ = std::numeric_limits<double>::infinity();
    ek_wmax_ = -std::numeric_limits<double>::infinity();
    budget_acc_ = 0;

    BallDeviation bd = ball_deviation(g_, s_);
    bool conv = bd.dev < p_.tol_conv * bd.rhat;
    out.traj.rec.push_back(snapshot(true, out.traj.dirs));
    std::size_t rec_count = 1;

    while (!conv && t_ < p_.t_max) {
        const StepInfo info = advance();
        bd = ball_deviation(g_, s_);
        if (p_.on_step) p_.on_step(*this, info, bd);
        conv = bd.dev < p_.tol_conv * bd.rhat;
        const bool stop = conv || t_ >= p_.t_max;
        if (step_ % p_.snapshot_every == 0 || stop) {
            const bool full = (rec_count % p_.full_every == 0) || stop;
            out.traj.rec.push_back(snapshot(full, out.traj.dirs));
            ++rec_count;
        }
    }
    out.converged = conv;
    out.rhat = bd.rhat;
    out.steps = step_;
    out.worst_drift = worst_drift_;
    if (p_.projection && p_.constraint.kind != ConstraintKind::External &&
        worst_drift_ > 1e-12) {
        std::ostringstream msg;
        msg << "constraint drift " << worst_drift_ << " exceeds 1e-12";
        note_failure(msg.str());
    }
    out.g_residual = p_.constraint.kind == ConstraintKind::External
                         ? diag_nan
                         : std::abs(g_value(p_.constraint, bd.rhat, bd.rhat) - c0_);
    out.monitor_failures = failures_;
    return out;
}

} // namespace cvx
