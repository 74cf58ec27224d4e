#include <cmath>
#include <numbers>

#include "cvx/errors.hpp"
#include "cvx/mixed_volumes.hpp"
#include "cvx/shapes.hpp"
#include "cvx/support_geometry.hpp"
#include "doctest.h"
#include "oracle_constants.hpp"

using namespace cvx;
namespace {
constexpr double pi = std::numbers::pi;

Quermass body(const SphereGrid& g, const ScalarField& s) {
    SymField tau;
    RadiiField r;
    tau_and_radii(g, s, tau, r);
    return quermassintegrals(g, s, r);
}
} // namespace

TEST_CASE("off-center ball quermassintegrals are exact") {
    const auto g = SphereGrid::circle(128);
    const auto q = body(g, sample_support(make_shape("ball:1.3,0.4,-0.1", 1), g));
    CHECK(q.V[0] == doctest::Approx(2 * pi).epsilon(1e-14));
    CHECK(q.V[1] == doctest::Approx(2 * pi * 1.3).epsilon(1e-13));
    CHECK(q.V[2] == doctest::Approx(2 * pi * 1.69).epsilon(1e-13));

    const auto g2 = SphereGrid::sphere(16);
    const auto q2 = body(g2, sample_support(make_shape("ball:2,0.1,0.2,-0.1", 2), g2));
    for (int j = 0; j <= 3; ++j)
        CHECK(q2.V[j] ==
              doctest::Approx(4 * pi * std::pow(2.0, j)).epsilon(1e-11));
}

TEST_CASE("ellipse perimeter and area match the reference values") {
    const auto g = SphereGrid::circle(256);
    const auto q = body(g, sample_support(make_shape("ellipse:2,1", 1), g));
    // V_1 integrates s alone (the curvature part telescopes): spectral accuracy.
    CHECK(q.V[1] == doctest::Approx(oracle::ellipse21_perimeter).epsilon(1e-13));
    // V_2 = 2 * area = 4 pi carries the second-order stencil error.
    CHECK(q.V[2] == doctest::Approx(4 * pi).epsilon(1e-4));
    const auto gf = SphereGrid::circle(2048);
    const auto qf = body(gf, sample_support(make_shape("ellipse:2,1", 1), gf));
    CHECK(qf.V[2] == doctest::Approx(4 * pi).epsilon(1e-6));
    CHECK(iso_ratio(qf, 1) ==
          doctest::Approx(oracle::ellipse21_iso1).epsilon(1e-6));
    CHECK(stability_pair(qf) ==
          doctest::Approx(oracle::ellipse21_stability).epsilon(1e-5));
}

TEST_CASE("ellipsoid quermassintegrals converge to the reference values") {
    const auto shape = make_shape("ellipsoid:1.5,1.2,1.0", 2);
    const double exact[3] = {oracle::ellipsoid_V1, oracle::ellipsoid_V2,
                             oracle::ellipsoid_V3};
    double err24 = 0, err48 = 0;
    for (int lat : {24, 48}) {
        const auto g = SphereGrid::sphere(static_cast<std::size_t>(lat));
        const auto q = body(g, sample_support(shape, g));
        double worst = 0;
        for (int j = 1; j <= 3; ++j)
            worst = std::max(worst, std::abs(q.V[j] - exact[j - 1]) / exact[j - 1]);
        (lat == 24 ? err24 : err48) = worst;
    }
    CHECK(err48 < 1e-3);
    CHECK(err48 < err24 / 3.0);
}

TEST_CASE("shifted quermassintegrals match a direct evaluation") {
    const auto g = SphereGrid::circle(256);
    const auto shape = make_shape("ellipse:2,1", 1);
    const auto s = sample_support(shape, g);
    SymField tau;
    RadiiField r;
    tau_and_radii(g, s, tau, r);
    const double delta = 0.37;
    const auto qs = quermassintegrals_shifted(g, s, r, delta);
    ScalarField s2(g.count);
    for (std::size_t i = 0; i < g.count; ++i) s2[i] = s[i] + delta;
    const auto q2 = body(g, s2);
    for (int j = 0; j <= 2; ++j)
        CHECK(qs.V[j] == doctest::Approx(q2.V[j]).epsilon(1e-12));
}

TEST_CASE("mean radii and isoperimetric ratios on a ball") {
    const auto g = SphereGrid::sphere(16);
    const auto q = body(g, sample_support(make_shape("ball:1.7", 2), g));
    for (int j = 1; j <= 3; ++j)
        CHECK(j_radius(q, j) == doctest::Approx(1.7).epsilon(1e-12));
    for (int l = 1; l <= 2; ++l)
        CHECK(iso_ratio(q, l) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(stability_pair(q) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("inequality audit is nonnegative on catalog bodies") {
    const auto g1 = SphereGrid::circle(512);
    const auto a1 = af_audit(body(g1, sample_support(make_shape("ellipse:2,1", 1), g1)));
    CHECK(a1.pass(1e-10));
    CHECK(!a1.residuals.empty());
    for (const auto& r : a1.residuals) CHECK(r.value >= -1e-10 * r.scale);

    const auto g2 = SphereGrid::sphere(32);
    const auto a2 =
        af_audit(body(g2, sample_support(make_shape("ellipsoid:1.5,1.2,1.0", 2), g2)));
    CHECK(a2.pass(1e-9));

    // ball: every residual is zero to rounding
    const auto a3 = af_audit(body(g1, sample_support(make_shape("ball:1.3", 1), g1)));
    CHECK(std::abs(a3.worst_normalized) < 1e-11);
}

TEST_CASE("inradius bound from the mean radii") {
    const auto g = SphereGrid::circle(512);
    const auto qb = body(g, sample_support(make_shape("ball:1.3", 1), g));
    // sigma - (sigma^2 - 1)^{1/2} amplifies the ~1e-16 quadrature roundoff
    // in sigma - 1 to ~1e-8, so the ball check cannot be tighter
    CHECK(diskant_inradius_bound(qb) == doctest::Approx(1.3).epsilon(1e-6));
    const auto qe = body(g, sample_support(make_shape("ellipse:2,1", 1), g));
    const double bound = diskant_inradius_bound(qe);
    CHECK(bound <= 1.0 + 1e-6); // true inradius is the short semi-axis
    CHECK(bound > 0.9);
}

TEST_CASE("curvature-weighted barycenter") {
    const auto g = SphereGrid::circle(256);
    const auto s = sample_support(make_shape("ball:1.1,0.3,-0.2", 1), g);
    const Vec3 c = steiner_point(g, s);
    CHECK(c.x == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(-0.2).epsilon(1e-12));

    // translation equivariance on a generic body
    const auto se = sample_support(make_shape("ellipse:2,1", 1), g);
    ScalarField st(g.count);
    for (std::size_t i = 0; i < g.count; ++i)
        st[i] = se[i] + 0.5 * g.node[i].x - 0.25 * g.node[i].y;
    const Vec3 d = steiner_point(g, st) - steiner_point(g, se);
    CHECK(d.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.y == doctest::Approx(-0.25).epsilon(1e-12));

    const auto g2 = SphereGrid::sphere(16);
    const auto s2 = sample_support(make_shape("ball:1.1,0.1,0.2,-0.3", 2), g2);
    const Vec3 c2 = steiner_point(g2, s2);
    CHECK(c2.x == doctest::Approx(0.1).epsilon(1e-11));
    CHECK(c2.y == doctest::Approx(0.2).epsilon(1e-11));
    CHECK(c2.z == doctest::Approx(-0.3).epsilon(1e-11));
}

TEST_CASE("inscribed ball of an ellipse") {
    const auto g = SphereGrid::circle(256);
    const auto s = sample_support(make_shape("ellipse:2,1", 1), g);
    const auto ib = inball_subgradient(g, s);
    CHECK(std::abs(ib.radius - 1.0) < 1e-4);
    CHECK(norm(ib.center) < 0.05);

    // off-center ball: recovers center and radius
    const auto sb = sample_support(make_shape("ball:1.2,0.4,0.1", 1), g);
    const auto ibb = inball_subgradient(g, sb);
    CHECK(std::abs(ibb.radius - 1.2) < 1e-6);
    CHECK(norm(ibb.center - Vec3{0.4, 0.1, 0}) < 1e-5);
}

TEST_CASE("certified circumradius of an ellipse") {
    const auto g = SphereGrid::circle(256);
    const auto s = sample_support(make_shape("ellipse:2,1", 1), g);
    const auto X = embed_boundary(g, s);
    Vec3 best;
    const double R =
        circumradius_certified(X, {steiner_point(g, s), Vec3{0.01, 0, 0}}, &best);
    CHECK(R == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(R >= 2.0 - 1e-12); // certified: true circumradius from any center >= 2
}

TEST_CASE("hausdorff distance and ball deviation") {
    const auto g = SphereGrid::circle(256);
    const auto se = sample_support(make_shape("ellipse:2,1", 1), g);
    const auto sb = sample_support(make_shape("ball:1.4142135623730951", 1), g);
    CHECK(hausdorff(g, se, sb) ==
          doctest::Approx(oracle::ellipse21_dh_ball).epsilon(1e-12));

    const auto dev = ball_deviation(g, se);
    CHECK(norm(dev.steiner) < 1e-12);
    CHECK(dev.rhat ==
          doctest::Approx(oracle::ellipse21_r_quermass).epsilon(1e-12));
    // rhat = P / (2 pi) ~ 1.54, so the larger gap is to the short semi-axis
    CHECK(dev.dev ==
          doctest::Approx(oracle::ellipse21_r_quermass - 1.0).epsilon(1e-10));

    // exact on off-center balls
    const auto so = sample_support(make_shape("ball:1.2,0.3,-0.1", 1), g);
    const auto devb = ball_deviation(g, so);
    CHECK(devb.dev < 1e-12);
    CHECK(devb.rhat == doctest::Approx(1.2).epsilon(1e-13));
}
