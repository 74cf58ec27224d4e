#pragma once
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cvx/diagnostics.hpp"
#include "cvx/fields.hpp"
#include "cvx/grid.hpp"
#include "cvx/mixed_volumes.hpp"

namespace cvx {

// Normal speed as a function of F = E_k(kappa)^(1/k): either the power F^alpha
// or an increasing scalar function mu(F) from the built-in catalog.
struct SpeedSpec {
    int k = 1;
    bool homogeneous = true;
    double alpha = 1.0;   // exponent when homogeneous
    std::string mu_name;  // catalog id otherwise
    std::function<double(double)> mu;   // value
    std::function<double(double)> mu_d; // derivative

    static SpeedSpec power(int k, double alpha);
    // Catalog: "z+z^3" (alias "cubic"), "expm1" (alias "exp(z)-1").
    static SpeedSpec from_catalog(int k, const std::string& name);

    double value(double F) const {
        if (!homogeneous) return mu(F);
        if (alpha == 1.0) return F;
        if (alpha == 2.0) return F * F;
        if (alpha == 0.5) return std::sqrt(F);
        return std::pow(F, alpha);
    }
    double slope(double F) const {
        if (!homogeneous) return mu_d(F);
        if (alpha == 1.0) return 1.0;
        if (alpha == 2.0) return 2.0 * F;
        return alpha * std::pow(F, alpha - 1.0);
    }
};

// Admissibility probe for nonhomogeneous speeds, evaluated on a log grid
// z in [1e-4, 1e4]: positivity of mu and mu', convexity combination
// z mu'' + 2 mu' >= 0, z^2 mu'/mu increasing and large at the right end,
// z mu'/mu bounded at the left end.  Violations are warnings (the conditions
// are sufficient, not necessary); non-finite evaluations count as violations.
struct MuProbe {
    bool pass = true;
    std::vector<std::string> warnings;
};

MuProbe probe_mu(const SpeedSpec& spec);

enum class ConstraintKind { Volume, Quermass, GeneralTheta, External };

// The conserved functional G(a, b) with a = r_{n+1-k}, b = r_{n+1} (mean
// radii), or an external forcing that replaces the balancing term entirely.
struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::Volume;
    double theta = 1.0;          // GeneralTheta: G = a^theta b^(1-theta)
    double external_scale = 1.0; // External: phi = scale * mean speed
    // Optional override of G and its partials (a, b) -> value.
    std::function<double(double, double)> G, Ga, Gb;
    // Optional override of the external forcing (t, mean_speed) -> phi.
    std::function<double(double, double)> external_phi;

    static ConstraintSpec volume();
    static ConstraintSpec quermass();
    static ConstraintSpec general(double theta);
    static ConstraintSpec external(double scale);
};

struct StepInfo {
    double dt = 0;
    double phi = 0;
    double delta = 0;     // projection shift applied
    double max_speed = 0; // max |speed| over nodes
    double budget = 0;    // 10 dt^2 (max speed)^2 omega
    double sandwich_lo = 0, sandwich_hi = 0;
};

class FlowEngine;

struct FlowParams {
    SpeedSpec speed;
    ConstraintSpec constraint;
    double cfl = 0.2;
    bool projection = true;
    double tol_conv = 1e-4;
    double t_max = 100.0;
    std::size_t snapshot_every = 50; // steps per record
    std::size_t full_every = 20;     // records per full record
    double eps_quad = diag_nan;      // quadrature error estimate (for audits)
    std::uint64_t seed = 0;          // reflection direction sample
    // Observer called by run() after every completed step with the post-step
    // roundness measurement; exceptions propagate and abort the run.
    std::function<void(const FlowEngine&, const StepInfo&, const BallDeviation&)>
        on_step;
};

struct RunResult {
    Trajectory traj;
    bool converged = false;
    double rhat = 0;      // best-fit ball radius at stop
    double g_residual = 0; // |G(rhat, rhat) - c0|
    std::size_t steps = 0;
    double worst_drift = 0; // max over steps of |G - c0| / |c0|
    std::vector<std::string> monitor_failures;
    bool monitors_ok() const { return monitor_failures.empty(); }
};

// Explicit Euler integrator for ds/dt = phi - speed with the balancing term
// phi chosen so that G(r_{n+1-k}, r_{n+1}) is conserved (or supplied
// externally), plus an exact scalar projection back onto the constraint
// after every step.
class FlowEngine {
public:
    FlowEngine(const SphereGrid& g, FlowParams params, ScalarField s0);

    // Fill the speed/phi caches for the current state without stepping.
    double current_phi();
    // Largest stable explicit step: cfl * min over nodes of h^2 / D.
    double stable_dt();
    // One step.  dt_forced > 0 bypasses the stability bound (tests only).
    StepInfo advance(double dt_forced = 0.0);
    // Full loop with records, convergence test, and monitors.
    RunResult run();

    const SphereGrid& grid() const { return g_; }
    const FlowParams& params() const { return p_; }
    double t() const { return t_; }
    std::size_t steps() const { return step_; }
    const ScalarField& s() const { return s_; }
    const SymField& tau() const { return tau_; }
    const RadiiField& radii() const { return radii_; }
    const ScalarField& speed() const { return psi_; } // valid after current_phi
    const Quermass& Q() const { return Q_; }
    double c0() const { return c0_; }
    // G(r_{n+1-k}, r_{n+1}) of the current state.
    double constraint_value() const;
    double worst_drift() const { return worst_drift_; }
    double ek_min() const { return ek_min_; }
    double ek_max() const { return ek_max_; }
    const std::vector<std::string>& monitor_failures() const { return failures_; }

private:
    struct ShiftPoly; // quermassintegrals of s + delta as polynomials in delta

    void refresh_geometry(); // tau, radii, Q, poly coefficients from s
    double phi_from_caches();
    double solve_projection(double bound);
    void note_failure(const std::string& msg);
    DiagRecord snapshot(bool full, const std::vector<Vec3>& dirs);

    const SphereGrid& g_;
    FlowParams p_;
    double t_ = 0;
    std::size_t step_ = 0;
    ScalarField s_;
    SymField tau_;
    RadiiField radii_;
    ScalarField psi_;
    Quermass Q_;
    double c0_ = 0;
    double prev_delta_ = 0;

    // pass-1 caches (valid when phi_fresh_)
    bool phi_fresh_ = false;
    double phi_ = 0, dt_stable_ = 0, max_speed_ = 0;
    double sandwich_lo_ = 0, sandwich_hi_ = 0;
    double ek_min_ = 0, ek_max_ = 0;

    // base reductions for the shift polynomials (updated with geometry)
    double W0_ = 0;               // sum of weights
    double S1_ = 0;               // integral of s
    double T1_ = 0;               // integral of s (r1 + r2), n = 2 only
    double rmin_ = 0, rmax_ = 0;  // principal radii extrema

    // run-loop accumulators
    double ek_wmin_ = 0, ek_wmax_ = 0, budget_acc_ = 0;
    double worst_drift_ = 0;
    std::vector<std::string> failures_;
};

} // namespace cvx
