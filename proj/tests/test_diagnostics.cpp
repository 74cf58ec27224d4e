#include <cmath>
#include <numbers>

#include "cvx/diagnostics.hpp"
#include "cvx/errors.hpp"
#include "cvx/flow.hpp"
#include "cvx/shapes.hpp"
#include "cvx/support_geometry.hpp"
#include "doctest.h"
#include "oracle_constants.hpp"

using namespace cvx;

TEST_CASE("direction sample") {
    const auto d1 = reflection_directions(1, 42);
    CHECK(d1.size() == 4 + 8);
    for (const Vec3& z : d1) {
        CHECK(norm(z) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(z.z == 0.0); // in-plane for curves
    }
    const auto d2 = reflection_directions(2, 42);
    CHECK(d2.size() == 6 + 8);
    CHECK(reflection_directions(2, 42)[7].x == d2[7].x); // deterministic
    CHECK(reflection_directions(2, 43)[7].x != d2[7].x);
}

TEST_CASE("reflection halfwidth of balls and ellipses") {
    const auto g = SphereGrid::circle(512);
    SUBCASE("off-center ball: halfwidth is the center offset") {
        const auto s = sample_support(make_shape("ball:1,0.25,0.15", 1), g);
        SymField tau;
        tau_field(g, s, tau);
        const auto X = embed_boundary(g, s);
        const double tol = 5 * interp_error_estimate(g, s, tau);
        for (const Vec3 z : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0.6, 0.8, 0}}) {
            const double expect = 0.25 * z.x + 0.15 * z.y;
            // the pair scan carries an O(dtheta^2) sampling defect
            CHECK(std::abs(reflection_halfwidth(g, s, X, z, tol) - expect) < 1e-3);
        }
    }
    SUBCASE("ellipse: symmetry planes through the origin") {
        const auto s = sample_support(make_shape("ellipse:2,1", 1), g);
        SymField tau;
        tau_field(g, s, tau);
        const auto X = embed_boundary(g, s);
        const double tol = 5 * interp_error_estimate(g, s, tau);
        const double lp = reflection_halfwidth(g, s, X, Vec3{1, 0, 0}, tol);
        const double lm = -reflection_halfwidth(g, s, X, Vec3{-1, 0, 0}, tol);
        // each bound is a sampled-max estimate with its own O(dtheta^2)
        // defect, so the bracket can land on either side of zero and even
        // invert by up to twice the containment tolerance
        CHECK(std::abs(lp) < 2 * tol);
        CHECK(std::abs(lm) < 2 * tol);
        CHECK(lp >= lm - 2 * tol);
    }
}

TEST_CASE("interpolation error estimate tracks the support Hessian") {
    const auto g = SphereGrid::circle(128);
    SymField tau;
    const auto sc = sample_support(make_shape("ball:1.3", 1), g);
    tau_field(g, sc, tau);
    // centered ball: the support Hessian vanishes identically
    CHECK(interp_error_estimate(g, sc, tau) < 1e-10);
    // off-center ball: s = r + c.z, so the Hessian is -(c.z) and the
    // estimate peaks at h^2 |c| / 8 (up to the node nearest to c)
    const auto s = sample_support(make_shape("ball:1.3,0.2,0.1", 1), g);
    tau_field(g, s, tau);
    const double peak =
        g.dtheta * g.dtheta * std::hypot(0.2, 0.1) / 8.0;
    const double est = interp_error_estimate(g, s, tau);
    CHECK(est > 0.99 * peak);
    CHECK(est <= peak * (1 + 1e-12));
    const auto se = sample_support(make_shape("ellipse:2,1", 1), g);
    tau_field(g, se, tau);
    CHECK(interp_error_estimate(g, se, tau) > 0);
}

TEST_CASE("curvature-over-support monitor on a centered ball") {
    const auto g = SphereGrid::circle(128);
    const double r = 1.4, alpha = 2.0;
    const ScalarField s(g.count, r);
    const ScalarField speed(g.count, std::pow(r, -alpha));
    const auto rep = tso_monitor(g, s, speed, Vec3{0, 0, 0}, r);
    CHECK(rep.W ==
          doctest::Approx((4.0 / 3.0) * std::pow(r, -alpha - 1)).epsilon(1e-13));
    CHECK(rep.c == doctest::Approx(r / 4).epsilon(1e-15));
    CHECK(std::abs(rep.min_margin) < 1e-13);
}

TEST_CASE("convergence residuals of the standard ellipse") {
    const auto g = SphereGrid::circle(256);
    const auto s = sample_support(make_shape("ellipse:2,1", 1), g);
    SymField tau;
    RadiiField r;
    tau_and_radii(g, s, tau, r);
    const auto q = quermassintegrals(g, s, r);
    ScalarField ek(g.count);
    ek_field(g, 1, r, ek);
    const auto res =
        convergence_residuals(g, s, q, 1, field_min(ek), field_max(ek));
    CHECK(res.rhat ==
          doctest::Approx(oracle::ellipse21_r_quermass).epsilon(1e-12));
    CHECK(res.d_ball ==
          doctest::Approx(oracle::ellipse21_r_quermass - 1.0).epsilon(1e-9));
    CHECK(res.ekflat > 0.1); // far from constant curvature
}

TEST_CASE("full record carries the deep diagnostics") {
    const auto g = SphereGrid::circle(256);
    FlowParams p;
    p.speed = SpeedSpec::power(1, 1.0);
    p.constraint = ConstraintSpec::volume();
    FlowEngine eng(g, p, sample_support(make_shape("ellipse:2,1", 1), g));
    eng.current_phi();

    const auto dirs = reflection_directions(1, 0);
    SnapshotView v;
    v.g = &g;
    v.k = 1;
    v.s = &eng.s();
    v.tau = &eng.tau();
    v.radii = &eng.radii();
    v.speed = &eng.speed();
    v.Q = eng.Q();
    v.phi = eng.current_phi();
    v.ek_min = eng.ek_min();
    v.ek_max = eng.ek_max();
    v.alpha = 1.0;

    const auto full = make_record(v, dirs, true);
    CHECK(full.full);
    CHECK(full.rho_minus == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(full.rho_plus == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(full.rho_minus <= full.rhat);
    CHECK(full.rhat <= full.rho_plus);
    REQUIRE(full.lam_plus.size() == dirs.size());
    REQUIRE(full.lam_minus.size() == dirs.size());
    // both bounds carry independent O(dtheta^2) sampling defects, so the
    // certified bracket may invert by up to twice the containment tolerance
    for (std::size_t i = 0; i < dirs.size(); ++i)
        CHECK(full.lam_plus[i] >= full.lam_minus[i] - 2 * full.tol_contain);
    // the axis planes are exact symmetry planes of the ellipse; halfwidths in
    // oblique directions are genuinely positive and are not checked here
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(full.lam_plus[i]) < full.tol_contain + 1e-4);
    CHECK(full.S == doctest::Approx(oracle::ellipse21_stability).epsilon(1e-2));
    CHECK(full.I_1 == doctest::Approx(oracle::ellipse21_iso1).epsilon(1e-4));
    CHECK(std::isfinite(full.tso_W));
    CHECK(full.tso_min_margin >= -1e-12);
    CHECK(full.interp_err > 0);
    CHECK(full.tol_contain == doctest::Approx(5 * full.interp_err));

    const auto cheap = make_record(v, dirs, false);
    CHECK(!cheap.full);
    CHECK(std::isnan(cheap.rho_minus));
    CHECK(cheap.lam_plus.empty());
    CHECK(cheap.Q.V[1] == full.Q.V[1]);
}

TEST_CASE("monotonicity audit over a trajectory") {
    const auto g = SphereGrid::circle(128);
    FlowParams p;
    p.speed = SpeedSpec::power(1, 1.0);
    p.constraint = ConstraintSpec::volume();
    p.tol_conv = 1e-3;
    p.snapshot_every = 50;
    FlowEngine eng(g, p, sample_support(make_shape("ellipse:1.5,1", 1), g));
    auto res = eng.run();
    REQUIRE(res.traj.rec.size() >= 3);
    const auto rep = monotonicity_report(res.traj);
    CHECK(rep.pass);
    CHECK(rep.violations.empty());

    // corrupt one record: growing perimeter must be flagged
    auto broken = res.traj;
    broken.rec[1].Q.V[1] = broken.rec[0].Q.V[1] + 1.0;
    const auto rep2 = monotonicity_report(broken);
    CHECK(!rep2.pass);
    CHECK(!rep2.violations.empty());
    CHECK(rep2.worst_quer > 0.9);

    Trajectory tiny;
    tiny.rec.resize(1);
    CHECK_THROWS_AS(monotonicity_report(tiny), InvalidConfig);
}
