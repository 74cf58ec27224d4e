#pragma once
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cvx/vec.hpp"

namespace cvx {

// Quadrature / finite-difference grid on S^1 or S^2.
//
// n = 1: N uniform angles theta_i = 2*pi*i/N, trapezoid weights 2*pi/N.
// n = 2: nlat Gauss-Legendre latitudes in cos(theta) (no polar nodes) times
//        nlon uniform longitudes; weights w_GL * (2*pi/nlon).  Latitude
//        stencils are non-uniform 3-point central differences; rows adjacent
//        to a pole close their stencil across it using the antipodal-in-phi
//        continuation f(-theta, phi) = f(theta, phi + pi), which is exact for
//        single-valued fields when nlon is even.
struct SphereGrid {
    int dim = 1;              // n (1 or 2)
    std::size_t count = 0;    // number of nodes
    std::vector<Vec3> node;   // unit outward directions
    std::vector<double> w;    // quadrature weights, sum = omega()

    // n = 1
    double dtheta = 0;

    // n = 2 layout: node index i = j*nlon + m (latitude j north->south)
    std::size_t nlat = 0, nlon = 0;
    double dphi = 0;
    std::vector<double> theta, sinth, costh, cot;    // per latitude
    std::vector<double> at, bt, att, btt;            // theta stencil coefficients
    std::vector<double> hloc;                        // local spacing min(dtheta, sin(theta)*dphi)
    std::vector<double> sinphi, cosphi;              // per longitude

    // One-dimensional stencil scales for the uniform direction (n = 1: theta,
    // n = 2: phi), tuned so first and second differences are exact on
    // {1, cos, sin} of the chart angle.  Together with the matching theta
    // coefficients this makes the discrete curvature operator annihilate
    // degree-one support components exactly, so translated bodies carry no
    // extra discretization error.
    double d1 = 0, d2 = 0;

    double omega() const {
        return dim == 1 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    }
    std::size_t row(std::size_t i) const { return i / nlon; }
    std::size_t col(std::size_t i) const { return i % nlon; }

    // Local grid spacing at node i (n = 1: dtheta).
    double spacing(std::size_t i) const {
        return dim == 1 ? dtheta : hloc[row(i)];
    }

    static SphereGrid circle(std::size_t n_nodes);
    // nlon defaults to 2*nlat when zero.
    static SphereGrid sphere(std::size_t n_lat, std::size_t n_lon = 0);
    // Same family at half resolution (quadrature-error estimation).
    SphereGrid coarsened() const;
};

// Value and chart derivatives at one node, already rotated into the
// orthonormal frame (e_theta, e_phi/sin(theta)).  For n = 1: g2 = h12 = h22 = 0.
struct LocalJet {
    double f;          // field value
    double g1, g2;     // gradient
    double h11, h12, h22; // covariant Hessian
};

namespace detail {

inline LocalJet jet1(const SphereGrid& g, const double* f, std::size_t i) {
    const std::size_t n = g.count;
    const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
    const std::size_t im = (i == 0) ? n - 1 : i - 1;
    LocalJet j{};
    j.f = f[i];
    j.g1 = (f[ip] - f[im]) * g.d1;
    j.h11 = ((f[ip] - f[i]) - (f[i] - f[im])) * g.d2;
    return j;
}

inline LocalJet jet2(const SphereGrid& g, const double* f, std::size_t i) {
    const std::size_t P = g.nlon;
    const std::size_t j = i / P, m = i % P;
    const std::size_t me = (m + 1 == P) ? 0 : m + 1;
    const std::size_t mw = (m == 0) ? P - 1 : m - 1;
    const std::size_t ma = (m + P / 2) % P;          // antipodal longitude
    const std::size_t mae = (ma + 1 == P) ? 0 : ma + 1;
    const std::size_t maw = (ma == 0) ? P - 1 : ma - 1;

    const double* rowc = f + j * P;
    const double f0 = rowc[m], fe = rowc[me], fw = rowc[mw];

    double fn, fne, fnw;                             // northern neighbor row
    if (j == 0) {
        fn = rowc[ma]; fne = rowc[mae]; fnw = rowc[maw];
    } else {
        const double* rn = f + (j - 1) * P;
        fn = rn[m]; fne = rn[me]; fnw = rn[mw];
    }
    double fs, fse, fsw;                             // southern neighbor row
    if (j + 1 == g.nlat) {
        fs = rowc[ma]; fse = rowc[mae]; fsw = rowc[maw];
    } else {
        const double* rs = f + (j + 1) * P;
        fs = rs[m]; fse = rs[me]; fsw = rs[mw];
    }

    const double inv2dp = g.d1;
    const double invdp2 = g.d2;
    const double at = g.at[j], bt = g.bt[j], att = g.att[j], btt = g.btt[j];

    const double ds = fs - f0, dn = f0 - fn;
    const double ft = at * ds + bt * dn;
    const double ftt = att * ds - btt * dn;
    const double fp = (fe - fw) * inv2dp;
    const double fpp = ((fe - f0) - (f0 - fw)) * invdp2;
    const double fpn = (fne - fnw) * inv2dp;
    const double fps = (fse - fsw) * inv2dp;
    const double ftp = at * (fps - fp) + bt * (fp - fpn);

    const double invsin = 1.0 / g.sinth[j];
    const double c = g.cot[j];
    LocalJet out{};
    out.f = f0;
    out.g1 = ft;
    out.g2 = fp * invsin;
    out.h11 = ftt;
    out.h12 = (ftp - c * fp) * invsin;
    out.h22 = fpp * invsin * invsin + c * ft;
    return out;
}

inline LocalJet jet(const SphereGrid& g, const double* f, std::size_t i) {
    return g.dim == 1 ? jet1(g, f, i) : jet2(g, f, i);
}

} // namespace detail

// Quadrature: sum f_i w_i (OpenMP reduction for large grids).
double integrate(const SphereGrid& g, std::span<const double> f);
// sum f_i g_i w_i
double integrate_product(const SphereGrid& g, std::span<const double> f,
                         std::span<const double> h);
double field_min(std::span<const double> f);
double field_max(std::span<const double> f);
// Quadrature mean: integrate(f)/omega.
double mean_value(const SphereGrid& g, std::span<const double> f);

// Serial reference implementations (plain loops, fixed summation order).
namespace ref {
double integrate(const SphereGrid& g, std::span<const double> f);
double integrate_product(const SphereGrid& g, std::span<const double> f,
                         std::span<const double> h);
} // namespace ref

// Gauss-Legendre nodes/weights on (-1, 1); nodes ascending.
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w);

// Loop-size threshold below which kernels stay serial.
inline constexpr std::size_t omp_grain = 2048;

} // namespace cvx
