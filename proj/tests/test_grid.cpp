#include <cmath>
#include <numbers>

#include "cvx/errors.hpp"
#include "cvx/fields.hpp"
#include "cvx/grid.hpp"
#include "doctest.h"

using namespace cvx;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("circle grid basics") {
    const auto g = SphereGrid::circle(96);
    CHECK(g.dim == 1);
    CHECK(g.count == 96);
    CHECK(g.dtheta == doctest::Approx(2 * pi / 96).epsilon(1e-15));
    double wsum = 0;
    for (double w : g.w) wsum += w;
    CHECK(wsum == doctest::Approx(2 * pi).epsilon(1e-14));
    for (const Vec3& z : g.node) {
        CHECK(norm(z) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(z.z == 0.0);
    }
}

TEST_CASE("sphere grid basics") {
    const auto g = SphereGrid::sphere(16);
    CHECK(g.dim == 2);
    CHECK(g.nlat == 16);
    CHECK(g.nlon == 32);
    CHECK(g.count == 16 * 32);
    CHECK(integrate(g, ScalarField(g.count, 1.0)) ==
          doctest::Approx(4 * pi).epsilon(1e-14));
    for (const Vec3& z : g.node)
        CHECK(norm(z) == doctest::Approx(1.0).epsilon(1e-14));
    // no polar nodes, latitudes strictly inside (0, pi), ascending
    for (std::size_t j = 0; j < g.nlat; ++j) {
        CHECK(g.theta[j] > 0.0);
        CHECK(g.theta[j] < pi);
        if (j) CHECK(g.theta[j] > g.theta[j - 1]);
    }
}

TEST_CASE("sphere quadrature integrates polynomials exactly") {
    const auto g = SphereGrid::sphere(12);
    ScalarField f(g.count);
    auto moment = [&](auto&& fn) {
        for (std::size_t i = 0; i < g.count; ++i) f[i] = fn(g.node[i]);
        return integrate(g, f);
    };
    CHECK(moment([](const Vec3& z) { return z.x + z.y + z.z; }) ==
          doctest::Approx(0.0).epsilon(1e-13));
    CHECK(moment([](const Vec3& z) { return z.z * z.z; }) ==
          doctest::Approx(4 * pi / 3).epsilon(1e-13));
    CHECK(moment([](const Vec3& z) { return z.x * z.y; }) ==
          doctest::Approx(0.0).epsilon(1e-13));
    CHECK(moment([](const Vec3& z) { return std::pow(z.z, 4); }) ==
          doctest::Approx(4 * pi / 5).epsilon(1e-13));
    CHECK(moment([](const Vec3& z) { return z.x * z.x * z.y * z.y; }) ==
          doctest::Approx(4 * pi / 15).epsilon(1e-13));
}

TEST_CASE("gauss-legendre nodes and weights") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    REQUIRE(x.size() == 5);
    double wsum = 0, m2 = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        wsum += w[i];
        m2 += w[i] * x[i] * x[i];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m2 == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(x[2] == doctest::Approx(0.0).epsilon(1e-15));
    // degree-9 exactness: integral of x^8 over [-1,1] = 2/9
    double m8 = 0;
    for (std::size_t i = 0; i < 5; ++i) m8 += w[i] * std::pow(x[i], 8);
    CHECK(m8 == doctest::Approx(2.0 / 9).epsilon(1e-14));
}

TEST_CASE("circle derivatives converge at second order") {
    // f(theta) = exp(sin theta): f'' known in closed form.
    double err[2];
    for (int pass = 0; pass < 2; ++pass) {
        const auto g = SphereGrid::circle(pass == 0 ? 128 : 256);
        ScalarField f(g.count);
        for (std::size_t i = 0; i < g.count; ++i)
            f[i] = std::exp(g.node[i].y); // sin(theta) = y
        double worst = 0;
        for (std::size_t i = 0; i < g.count; ++i) {
            const auto jet = detail::jet(g, f.data(), i);
            const double st = g.node[i].y, ct = g.node[i].x;
            const double exact = std::exp(st) * (ct * ct - st);
            worst = std::max(worst, std::abs(jet.h11 - exact));
        }
        err[pass] = worst;
    }
    CHECK(err[0] / err[1] > 3.6);
    CHECK(err[0] / err[1] < 4.4);
}

TEST_CASE("sphere jet is exact on degree-one fields") {
    // f = z . e is an eigenfunction: covariant Hessian = -f * identity, so
    // h11 + f = h22 + f = 0 and h12 = 0 at every node including pole rows.
    const auto g = SphereGrid::sphere(10, 24);
    ScalarField f(g.count);
    for (std::size_t i = 0; i < g.count; ++i)
        f[i] = 0.7 * g.node[i].x - 0.4 * g.node[i].y + 0.2 * g.node[i].z;
    double worst = 0;
    for (std::size_t i = 0; i < g.count; ++i) {
        const auto jet = detail::jet(g, f.data(), i);
        worst = std::max({worst, std::abs(jet.h11 + jet.f),
                          std::abs(jet.h22 + jet.f), std::abs(jet.h12)});
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("circle jet is rotation-equivariant") {
    const auto g = SphereGrid::circle(64);
    ScalarField f(g.count), fr(g.count);
    for (std::size_t i = 0; i < g.count; ++i) {
        const double th = g.dtheta * static_cast<double>(i);
        f[i] = 1.5 + 0.2 * std::cos(3 * th) + 0.1 * std::sin(th);
    }
    const std::size_t shift = 17;
    for (std::size_t i = 0; i < g.count; ++i) fr[i] = f[(i + shift) % g.count];
    for (std::size_t i = 0; i < g.count; ++i) {
        const auto a = detail::jet(g, fr.data(), i);
        const auto b = detail::jet(g, f.data(), (i + shift) % g.count);
        CHECK(a.h11 == b.h11);
        CHECK(a.g1 == b.g1);
    }
}

TEST_CASE("coarsened grid halves the resolution") {
    const auto c = SphereGrid::circle(128).coarsened();
    CHECK(c.count == 64);
    CHECK(integrate(c, ScalarField(c.count, 1.0)) ==
          doctest::Approx(2 * pi).epsilon(1e-14));
    const auto s = SphereGrid::sphere(16, 40).coarsened();
    CHECK(s.nlat == 8);
    CHECK(s.nlon == 20);
    CHECK(integrate(s, ScalarField(s.count, 1.0)) ==
          doctest::Approx(4 * pi).epsilon(1e-13));
}

TEST_CASE("grid constructor rejects degenerate sizes") {
    CHECK_THROWS_AS(SphereGrid::circle(4), InvalidConfig);
    CHECK_THROWS_AS(SphereGrid::sphere(2), InvalidConfig);
    CHECK_THROWS_AS(SphereGrid::sphere(8, 7), InvalidConfig); // odd nlon
}
