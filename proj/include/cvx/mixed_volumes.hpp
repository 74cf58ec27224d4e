#pragma once
#include <span>
#include <string>
#include <vector>

#include "cvx/fields.hpp"
#include "cvx/grid.hpp"

namespace cvx {

// Quermassintegrals V_0 .. V_{n+1} of the convex body with support function s,
// computed by quadrature over the normal parametrization:
//   V_m     = integral of E_m(principal radii) dsigma   (m = 0..n)
//   V_{n+1} = integral of s * (product of radii) dsigma
// Ball of radius r: V_j = omega * r^j.  n = 1: V_1 = perimeter, V_2 = 2*area.
// n = 2: V_1 = 2*pi*(mean width), V_2 = surface area, V_3 = 3*volume.
struct Quermass {
    int n = 1;
    double V[4] = {0, 0, 0, 0}; // V_0..V_{n+1}; V[3] unused when n = 1
};

Quermass quermassintegrals(const SphereGrid& g, std::span<const double> s,
                           const RadiiField& r);

// Quermassintegrals of the outward-shifted body s + delta (radii shift by the
// same delta); used by the constraint projection.
Quermass quermassintegrals_shifted(const SphereGrid& g, std::span<const double> s,
                                   const RadiiField& r, double delta);

// Mean j-th radius (V_j / omega)^(1/j), j >= 1.
double j_radius(const Quermass& q, int j);

// Scale-invariant isoperimetric ratio I_l = V_l^(n+1) / (V_0^(n+1-l) V_{n+1}^l).
// Equals 1 on balls, >= 1 otherwise, and is non-increasing under the flow.
double iso_ratio(const Quermass& q, int ell);

// Sphericity gap V_1^2 - V_0 V_2 (>= 0, zero exactly on balls).
double stability_pair(const Quermass& q);

// One inequality of the quermassintegral chain, stated as residual >= 0.
struct AfResidual {
    std::string label;
    double value = 0; // residual, nonnegative in exact arithmetic
    double scale = 0; // magnitude of the terms, for relative comparison
};

struct AfReport {
    std::vector<AfResidual> residuals;
    double worst_normalized = 0; // min over residuals of value/scale
    bool pass(double tol_rel) const { return worst_normalized >= -tol_rel; }
};

// Full inequality audit: consecutive log-concavity V_{n+1-j}^2 >= V_{n-j} V_{n+2-j}
// and the sphere-normalized chain V_{n+1-j}^(n+1-i) >= omega^(j-i) V_{n+1-i}^(n+1-j).
AfReport af_audit(const Quermass& q);

// Inradius lower bound from the last two mean radii:
//   rho_- >= r_{n+1} * (sigma - (sigma^(n+1) - 1)^(1/(n+1))), sigma = r_n / r_{n+1}.
double diskant_inradius_bound(const Quermass& q);

// Curvature-weighted barycenter ((n+1)/omega) * integral of s z dsigma.
// Fixed under the flow's global term; the natural center for roundness tests.
Vec3 steiner_point(const SphereGrid& g, std::span<const double> s);

struct Inball {
    Vec3 center;
    double radius = 0;
    int iters = 0;
};

// Largest ball inside the sampled support slab {x : x . z_i <= s_i for all i},
// found by damped subgradient ascent on p -> min_i (s_i - p . z_i) starting
// from the Steiner point.
Inball inball_subgradient(const SphereGrid& g, std::span<const double> s);

// Smallest over the candidate centers of the max distance to the embedded
// boundary points; returns the radius and writes the winning center.
double circumradius_certified(const std::vector<Vec3>& X,
                              const std::vector<Vec3>& centers, Vec3* best = nullptr);

// Hausdorff distance of two bodies on the same grid: max |s1 - s2|.
double hausdorff(const SphereGrid& g, std::span<const double> s1,
                 std::span<const double> s2);

// Deviation from the centered ball: recenter at the Steiner point, take the
// mean radius rhat, and measure max |s_centered - rhat|.
struct BallDeviation {
    Vec3 steiner;
    double rhat = 0;
    double dev = 0;
};

BallDeviation ball_deviation(const SphereGrid& g, std::span<const double> s);

namespace ref {
Quermass quermassintegrals(const SphereGrid& g, std::span<const double> s,
                           const RadiiField& r);
} // namespace ref

} // namespace cvx
