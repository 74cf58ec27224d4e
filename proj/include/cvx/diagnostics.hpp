#pragma once
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cvx/fields.hpp"
#include "cvx/grid.hpp"
#include "cvx/mixed_volumes.hpp"

namespace cvx {

inline constexpr double diag_nan = std::numeric_limits<double>::quiet_NaN();

// One trajectory snapshot.  Cheap scalar diagnostics are always present;
// the more expensive geometry probes (reflection, inball, circumradius,
// curvature-over-support monitor) are filled only when `full` is set.
struct DiagRecord {
    double t = 0;
    std::size_t step = 0;
    bool full = false;
    int n = 1;

    Quermass Q;
    double r[3] = {0, 0, 0}; // mean radii r_1..r_{n+1}
    double I_iso = 0;        // iso_ratio(n+1-k)
    double I_1 = 0;
    double S = 0;            // V_1^2 - V_0 V_2
    double phi = 0;
    double ek_min = 0, ek_max = 0;   // E_k extrema of this state
    double ek_wmin = 0, ek_wmax = 0; // E_k extrema over all steps since prev record
    double rmin = 0, rmax = 0;       // principal radii extrema
    double budget = 0;               // accumulated Euler truncation budget since prev
    Vec3 steiner;
    double rhat = 0, d_ball = 0, ekflat = 0;

    // full-only fields
    double rho_minus = diag_nan, rho_plus = diag_nan;
    Vec3 inball_center;
    double tso_W = diag_nan, tso_c = diag_nan;
    double tso_bound_static = diag_nan, tso_bound_decay = diag_nan;
    double tso_min_margin = diag_nan; // min over nodes of (u - c) - 3 rho_minus/4
    std::vector<double> lam_plus, lam_minus; // per sampled direction
    double tol_contain = diag_nan;
    double interp_err = diag_nan;
};

struct Trajectory {
    int n = 1, k = 1;
    std::vector<Vec3> dirs; // reflection direction sample
    std::vector<DiagRecord> rec;
    double eps_quad = diag_nan; // relative quadrature error estimate at t = 0
};

// Fixed direction sample: the 2(n+1) signed axes plus 8 seeded random
// directions (in-plane for n = 1).
std::vector<Vec3> reflection_directions(int n, std::uint64_t seed);

// Least offset lambda such that reflecting the boundary part beyond the plane
// {x.z = lambda} lands inside the body, tested against the sampled support
// function with slack tol.  Closed-form scan over (boundary point, grid
// direction) pairs; directions with z.w >= 0 can never be violated.
double reflection_halfwidth(const SphereGrid& g, std::span<const double> s,
                            const std::vector<Vec3>& X, const Vec3& zdir, double tol);

// Interpolation error estimate for the sampled support function:
// (1/8) max over nodes of h_loc^2 (|H11| + 2|H12| + |H22|), H = tau - s I.
double interp_error_estimate(const SphereGrid& g, std::span<const double> s,
                             const SymField& tau);

// Curvature-over-support monitor W = speed / (u - c) with u the support about
// the inball center and c = rho_minus / 4.
struct TsoReport {
    double W = 0;          // max over nodes
    double c = 0;
    double min_margin = 0; // min over nodes of (u - c) - 3 rho_minus / 4
};

TsoReport tso_monitor(const SphereGrid& g, std::span<const double> s,
                      std::span<const double> speed, const Vec3& inball_center,
                      double rho_minus);

// Everything a record is assembled from; pointers refer to engine caches.
struct SnapshotView {
    const SphereGrid* g = nullptr;
    double t = 0;
    std::size_t step = 0;
    int k = 1;
    const ScalarField* s = nullptr;
    const SymField* tau = nullptr;
    const RadiiField* radii = nullptr;
    const ScalarField* speed = nullptr; // may be null (no step taken yet)
    Quermass Q;
    double phi = 0;
    double ek_min = 0, ek_max = 0;
    double ek_wmin = 0, ek_wmax = 0;
    double budget = 0;
    double alpha = diag_nan; // homogeneous exponent, NaN otherwise
};

DiagRecord make_record(const SnapshotView& v, const std::vector<Vec3>& dirs,
                       bool full);

// Discrete monotonicity audit over consecutive records:
//   delta V_{n+1} >= -tol, delta V_{n+1-k} <= tol, delta I_{n+1-k} <= tol,
// where tol is the accumulated truncation budget of the interval.
struct MonotonicityReport {
    double worst_vol = 0;  // most positive violation of Delta V_{n+1} >= -tol
    double worst_quer = 0; // most positive violation of Delta V_{n+1-k} <= tol
    double worst_iso = 0;  // most positive violation of Delta I_{n+1-k} <= tol
    double t_worst_vol = 0, t_worst_quer = 0, t_worst_iso = 0;
    bool pass = true;
    std::vector<std::string> violations;
};

MonotonicityReport monotonicity_report(const Trajectory& traj);

// Ball-convergence residuals of one state: d_ball and rhat from the Steiner
// centering, ek_flatness = max |E_k - V_{n-k}/V_n| over the grid.
struct ConvergenceResiduals {
    double d_ball = 0, rhat = 0, ekflat = 0;
};

ConvergenceResiduals convergence_residuals(const SphereGrid& g,
                                           std::span<const double> s,
                                           const Quermass& Q, int k,
                                           double ek_min, double ek_max);

} // namespace cvx
