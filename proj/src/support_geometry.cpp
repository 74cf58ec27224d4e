#include "cvx/support_geometry.hpp"

#include <cmath>
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

inline void tau_at(const SphereGrid& g, const double* s, std::size_t i, double& a11,
                   double& a12, double& a22) {
    const LocalJet j = detail::jet(g, s, i);
    a11 = j.h11 + j.f;
    a12 = j.h12;
    a22 = j.h22 + j.f;
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

void tau_field(const SphereGrid& g, std::span<const double> s, SymField& tau) {
    check_size(g, s.size(), "support field");
    tau.resize(g.count, g.dim);
    const double* f = s.data();
    if (g.dim == 1) {
        double* a11 = tau.a11.data();
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i) {
            const LocalJet j = detail::jet1(g, f, i);
            a11[i] = j.h11 + j.f;
        }
        return;
    }
    double* a11 = tau.a11.data();
    double* a12 = tau.a12.data();
    double* a22 = tau.a22.data();
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
    for (std::size_t i = 0; i < g.count; ++i)
        tau_at(g, f, i, a11[i], a12[i], a22[i]);
}

void gradient_field(const SphereGrid& g, std::span<const double> s, VecField& grad) {
    check_size(g, s.size(), "support field");
    grad.resize(g.count, g.dim);
    const double* f = s.data();
    double* c1 = grad.c1.data();
    if (g.dim == 1) {
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i)
            c1[i] = detail::jet1(g, f, i).g1;
        return;
    }
    double* c2 = grad.c2.data();
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
    for (std::size_t i = 0; i < g.count; ++i) {
        const LocalJet j = detail::jet2(g, f, i);
        c1[i] = j.g1;
        c2[i] = j.g2;
    }
}

void principal_radii(const SphereGrid& g, const SymField& tau, RadiiField& r) {
    check_size(g, tau.a11.size(), "tensor field");
    r.resize(g.count, g.dim);
    const double* a11 = tau.a11.data();
    double* r1 = r.r1.data();
    if (g.dim == 1) {
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i)
            r1[i] = a11[i];
        return;
    }
    const double* a12 = tau.a12.data();
    const double* a22 = tau.a22.data();
    double* r2 = r.r2.data();
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
    for (std::size_t i = 0; i < g.count; ++i)
        radii_of(2, a11[i], a12[i], a22[i], r1[i], r2[i]);
}

void tau_and_radii(const SphereGrid& g, std::span<const double> s, SymField& tau,
                   RadiiField& r) {
    check_size(g, s.size(), "support field");
    tau.resize(g.count, g.dim);
    r.resize(g.count, g.dim);
    const double* f = s.data();
    double* ta11 = tau.a11.data();
    double* r1 = r.r1.data();
    if (g.dim == 1) {
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i) {
            const LocalJet j = detail::jet1(g, f, i);
            ta11[i] = j.h11 + j.f;
            r1[i] = ta11[i];
        }
        return;
    }
    double* ta12 = tau.a12.data();
    double* ta22 = tau.a22.data();
    double* r2 = r.r2.data();
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
    for (std::size_t i = 0; i < g.count; ++i) {
        tau_at(g, f, i, ta11[i], ta12[i], ta22[i]);
        radii_of(2, ta11[i], ta12[i], ta22[i], r1[i], r2[i]);
    }
}

double ek_from_radii(int n, int k, double r1, double r2) {
    if (k == 0) return 1.0;
    if (n == 1) {
        if (k == 1) return 1.0 / r1;
    } else if (n == 2) {
        if (k == 1) return (r1 + r2) / (2.0 * r1 * r2);
        if (k == 2) return 1.0 / (r1 * r2);
    }
    throw InvalidConfig("curvature order k must lie in [0, n]");
}

double sigma_n_from_radii(int n, double r1, double r2) {
    return n == 1 ? r1 : r1 * r2;
}

void ek_field(const SphereGrid& g, int k, const RadiiField& r, ScalarField& out) {
    check_size(g, r.r1.size(), "radii field");
    out.assign(g.count, 0.0);
    const double* r1 = r.r1.data();
    double* o = out.data();
    if (k == 0) {
        out.assign(g.count, 1.0);
        return;
    }
    if (g.dim == 1) {
        if (k != 1) throw InvalidConfig("curvature order k must lie in [0, n]");
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i)
            o[i] = 1.0 / r1[i];
        return;
    }
    const double* r2 = r.r2.data();
    if (k == 1) {
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i)
            o[i] = (r1[i] + r2[i]) / (2.0 * r1[i] * r2[i]);
    } else if (k == 2) {
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i)
            o[i] = 1.0 / (r1[i] * r2[i]);
    } else {
        throw InvalidConfig("curvature order k must lie in [0, n]");
    }
}

std::vector<Vec3> embed_boundary(const SphereGrid& g, std::span<const double> s) {
    check_size(g, s.size(), "support field");
    VecField grad;
    gradient_field(g, s, grad);
    std::vector<Vec3> X(g.count);
    const double* f = s.data();
    const double* c1 = grad.c1.data();
    if (g.dim == 1) {
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
        for (std::size_t i = 0; i < g.count; ++i) {
            const Vec3 z = g.node[i];
            const Vec3 et{-z.y, z.x, 0.0};
            X[i] = f[i] * z + c1[i] * et;
        }
        return X;
    }
    const double* c2 = grad.c2.data();
#pragma omp parallel for schedule(static) if (g.count >= omp_grain)
    for (std::size_t i = 0; i < g.count; ++i) {
        const std::size_t j = g.row(i), m = g.col(i);
        const double ct = g.costh[j], st = g.sinth[j];
        const double cp = g.cosphi[m], sp = g.sinphi[m];
        const Vec3 z = g.node[i];
        const Vec3 et{ct * cp, ct * sp, -st};
        const Vec3 ep{-sp, cp, 0.0};
        X[i] = f[i] * z + c1[i] * et + c2[i] * ep;
    }
    return X;
}

double epsilon_convex(const SphereGrid& g, std::span<const double> s) {
    return 1e-8 * mean_value(g, s);
}

void require_strictly_convex(const SphereGrid& g, const RadiiField& r, double eps,
                             bool initial) {
    check_size(g, r.r1.size(), "radii field");
    const double rmin = field_min(r.r1);
    if (!(rmin > eps)) {
        std::ostringstream msg;
        msg << (initial ? "initial data is not strictly convex"
                        : "evolving surface lost strict convexity")
            << ": min principal radius " << rmin << " <= margin " << eps;
        if (initial) throw NonConvexInput(msg.str());
        throw LossOfConvexity(msg.str());
    }
}

namespace ref {

void tau_field(const SphereGrid& g, std::span<const double> s, SymField& tau) {
    check_size(g, s.size(), "support field");
    tau.resize(g.count, g.dim);
    const double* f = s.data();
    for (std::size_t i = 0; i < g.count; ++i) {
        if (g.dim == 1) {
            const LocalJet j = detail::jet1(g, f, i);
            tau.a11[i] = j.h11 + j.f;
        } else {
            tau_at(g, f, i, tau.a11[i], tau.a12[i], tau.a22[i]);
        }
    }
}

void tau_and_radii(const SphereGrid& g, std::span<const double> s, SymField& tau,
                   RadiiField& r) {
    ref::tau_field(g, s, tau);
    r.resize(g.count, g.dim);
    if (g.dim == 1) {
        for (std::size_t i = 0; i < g.count; ++i) r.r1[i] = tau.a11[i];
        return;
    }
    for (std::size_t i = 0; i < g.count; ++i)
        radii_of(2, tau.a11[i], tau.a12[i], tau.a22[i], r.r1[i], r.r2[i]);
}

} // namespace ref

} // namespace cvx
