#include "cvx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvx/errors.hpp"

namespace cvx {

namespace {
constexpr double pi = std::numbers::pi;
}

void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    // Newton iteration on P_n with the Tricomi initial guess; symmetric pairs.
    const std::size_t half = (n + 1) / 2;
    for (std::size_t k = 0; k < half; ++k) {
        double xi = std::cos(pi * (static_cast<double>(k) + 0.75) /
                             (static_cast<double>(n) + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(xi) and P_{n-1}(xi)
            double p0 = 1.0, p1 = xi;
            for (std::size_t l = 2; l <= n; ++l) {
                const double pl = ((2.0 * l - 1.0) * xi * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = pl;
            }
            dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double wk = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[n - 1 - k] = xi;      // ascending order
        x[k] = -xi;
        w[k] = w[n - 1 - k] = wk;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
}

SphereGrid SphereGrid::circle(std::size_t n_nodes) {
    if (n_nodes < 8) throw InvalidConfig("circle grid needs at least 8 nodes");
    SphereGrid g;
    g.dim = 1;
    g.count = n_nodes;
    g.dtheta = 2.0 * pi / static_cast<double>(n_nodes);
    g.d1 = 1.0 / (2.0 * std::sin(g.dtheta));
    g.d2 = 1.0 / (2.0 * (1.0 - std::cos(g.dtheta)));
    g.node.resize(n_nodes);
    g.w.assign(n_nodes, g.dtheta);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double t = g.dtheta * static_cast<double>(i);
        g.node[i] = {std::cos(t), std::sin(t), 0.0};
    }
    return g;
}

SphereGrid SphereGrid::sphere(std::size_t n_lat, std::size_t n_lon) {
    if (n_lon == 0) n_lon = 2 * n_lat;
    if (n_lat < 4) throw InvalidConfig("sphere grid needs at least 4 latitudes");
    if (n_lon < 8 || n_lon % 2 != 0)
        throw InvalidConfig(
            "sphere grid needs an even longitude count of at least 8 "
            "(cross-pole closure)");

    SphereGrid g;
    g.dim = 2;
    g.nlat = n_lat;
    g.nlon = n_lon;
    g.count = n_lat * n_lon;
    g.dphi = 2.0 * pi / static_cast<double>(n_lon);
    g.d1 = 1.0 / (2.0 * std::sin(g.dphi));
    g.d2 = 1.0 / (2.0 * (1.0 - std::cos(g.dphi)));

    std::vector<double> xg, wg;
    gauss_legendre(n_lat, xg, wg);
    // x = cos(theta) descending <=> theta ascending (north to south)
    std::reverse(xg.begin(), xg.end());
    std::reverse(wg.begin(), wg.end());

    g.theta.resize(n_lat);
    g.sinth.resize(n_lat);
    g.costh.resize(n_lat);
    g.cot.resize(n_lat);
    g.at.resize(n_lat);
    g.bt.resize(n_lat);
    g.att.resize(n_lat);
    g.btt.resize(n_lat);
    g.hloc.resize(n_lat);
    for (std::size_t j = 0; j < n_lat; ++j) {
        g.theta[j] = std::acos(xg[j]);
        g.sinth[j] = std::sqrt(std::max(0.0, 1.0 - xg[j] * xg[j]));
        g.costh[j] = xg[j];
        g.cot[j] = g.costh[j] / g.sinth[j];
    }
    for (std::size_t j = 0; j < n_lat; ++j) {
        const double hm = (j == 0) ? 2.0 * g.theta[0] : g.theta[j] - g.theta[j - 1];
        const double hp = (j + 1 == n_lat) ? 2.0 * (pi - g.theta[n_lat - 1])
                                           : g.theta[j + 1] - g.theta[j];
        // Nonuniform three-point stencil tuned to differentiate
        // {1, cos theta, sin theta} exactly (see the d1/d2 comment in the
        // header); reduces to the polynomial stencil as the spacing -> 0.
        const double cm = 1.0 - std::cos(hm), cp = 1.0 - std::cos(hp);
        const double sm = std::sin(hm), sp = std::sin(hp);
        const double den = sm * cp + sp * cm;
        g.at[j] = cm / den;              // coefficient of (f_south - f_0) in f_theta
        g.bt[j] = cp / den;              // coefficient of (f_0 - f_north) in f_theta
        g.att[j] = sm / den;             // second-derivative counterparts
        g.btt[j] = sp / den;
        g.hloc[j] = std::min(std::min(hm, hp), g.sinth[j] * g.dphi);
    }

    g.sinphi.resize(n_lon);
    g.cosphi.resize(n_lon);
    for (std::size_t m = 0; m < n_lon; ++m) {
        const double p = g.dphi * static_cast<double>(m);
        g.sinphi[m] = std::sin(p);
        g.cosphi[m] = std::cos(p);
    }

    g.node.resize(g.count);
    g.w.resize(g.count);
    for (std::size_t j = 0; j < n_lat; ++j)
        for (std::size_t m = 0; m < n_lon; ++m) {
            g.node[j * n_lon + m] = {g.sinth[j] * g.cosphi[m],
                                     g.sinth[j] * g.sinphi[m], g.costh[j]};
            g.w[j * n_lon + m] = wg[j] * g.dphi;
        }
    return g;
}

SphereGrid SphereGrid::coarsened() const {
    if (dim == 1) return circle(std::max<std::size_t>(8, count / 2));
    return sphere(std::max<std::size_t>(4, nlat / 2),
                  std::max<std::size_t>(8, nlon / 2) / 2 * 2);
}

double integrate(const SphereGrid& g, std::span<const double> f) {
    if (f.size() != g.count) throw GridMismatch("integrate: field size != grid size");
    double acc = 0.0;
    const double* fp = f.data();
    const double* wp = g.w.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.count);
#pragma omp parallel for schedule(static) reduction(+ : acc) if (g.count >= omp_grain)
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += fp[i] * wp[i];
    return acc;
}

double integrate_product(const SphereGrid& g, std::span<const double> f,
                         std::span<const double> h) {
    if (f.size() != g.count || h.size() != g.count)
        throw GridMismatch("integrate_product: field size != grid size");
    double acc = 0.0;
    const double* fp = f.data();
    const double* hp = h.data();
    const double* wp = g.w.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.count);
#pragma omp parallel for schedule(static) reduction(+ : acc) if (g.count >= omp_grain)
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += fp[i] * hp[i] * wp[i];
    return acc;
}

double field_min(std::span<const double> f) {
    double m = f[0];
    const double* fp = f.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static) reduction(min : m) if (f.size() >= omp_grain)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::min(m, fp[i]);
    return m;
}

double field_max(std::span<const double> f) {
    double m = f[0];
    const double* fp = f.data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static) reduction(max : m) if (f.size() >= omp_grain)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, fp[i]);
    return m;
}

double mean_value(const SphereGrid& g, std::span<const double> f) {
    return integrate(g, f) / g.omega();
}

namespace ref {

double integrate(const SphereGrid& g, std::span<const double> f) {
    if (f.size() != g.count) throw GridMismatch("integrate: field size != grid size");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.count; ++i) acc += f[i] * g.w[i];
    return acc;
}

double integrate_product(const SphereGrid& g, std::span<const double> f,
                         std::span<const double> h) {
    if (f.size() != g.count || h.size() != g.count)
        throw GridMismatch("integrate_product: field size != grid size");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.count; ++i) acc += f[i] * h[i] * g.w[i];
    return acc;
}

} // namespace ref

} // namespace cvx
