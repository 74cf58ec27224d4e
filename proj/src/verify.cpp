#include "cvx/verify.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "cvx/diagnostics.hpp"
#include "cvx/errors.hpp"
#include "cvx/flow.hpp"
#include "cvx/mixed_volumes.hpp"
#include "cvx/shapes.hpp"
#include "cvx/support_geometry.hpp"

namespace cvx {

namespace {

constexpr double pi = std::numbers::pi;

struct Battery {
    std::ostream& out;
    bool verbose;
    int failures = 0;

    // A check passes when |measured - expected| <= tol.
    void check(const std::string& label, double measured, double expected,
               double tol) {
        const double err = std::abs(measured - expected);
        const bool ok = err <= tol && std::isfinite(measured);
        if (!ok) ++failures;
        out << (ok ? "[ok]   " : "[FAIL] ") << label;
        if (!ok || verbose)
            out << "  (measured " << measured << ", expected " << expected
                << " +- " << tol << ")";
        out << "\n";
    }

    void run(const std::string& label, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            ++failures;
            out << "[FAIL] " << label << "  (exception: " << e.what() << ")\n";
        }
    }
};

} // namespace

int verify_all(std::ostream& out, bool verbose) {
    Battery b{out, verbose};
    out.precision(12);

    b.run("quadrature weights", [&] {
        const auto c = SphereGrid::circle(64);
        const auto s2 = SphereGrid::sphere(12);
        b.check("circle weights sum to 2 pi", integrate(c, ScalarField(c.count, 1.0)),
                2 * pi, 1e-13);
        b.check("sphere weights sum to 4 pi", integrate(s2, ScalarField(s2.count, 1.0)),
                4 * pi, 1e-12);
        ScalarField z2(s2.count);
        for (std::size_t i = 0; i < s2.count; ++i) z2[i] = s2.node[i].z * s2.node[i].z;
        b.check("sphere quadrature of z^2", integrate(s2, z2), 4 * pi / 3, 1e-12);
    });

    b.run("linear support has zero curvature tensor", [&] {
        const auto g = SphereGrid::sphere(16);
        ScalarField s(g.count);
        for (std::size_t i = 0; i < g.count; ++i)
            s[i] = 0.3 * g.node[i].x - 0.2 * g.node[i].y + 0.5 * g.node[i].z;
        SymField tau;
        tau_field(g, s, tau);
        double worst = 0;
        for (std::size_t i = 0; i < g.count; ++i)
            worst = std::max({worst, std::abs(tau.a11[i]), std::abs(tau.a12[i]),
                              std::abs(tau.a22[i])});
        b.check("max |tau| of a translate of a point", worst, 0.0, 1e-10);
    });

    b.run("ball quermassintegrals", [&] {
        for (int n = 1; n <= 2; ++n) {
            const auto g = n == 1 ? SphereGrid::circle(128) : SphereGrid::sphere(16);
            const auto shape = make_shape("ball:1.7,0.2,-0.1", n);
            const auto s = sample_support(shape, g);
            SymField tau;
            RadiiField r;
            tau_and_radii(g, s, tau, r);
            const auto q = quermassintegrals(g, s, r);
            for (int j = 1; j <= n + 1; ++j) {
                std::ostringstream label;
                label << "n=" << n << " offset ball V_" << j;
                b.check(label.str(), q.V[j], g.omega() * std::pow(1.7, j),
                        1e-10 * q.V[j]);
            }
        }
    });

    b.run("enclosed-area refinement converges at second order", [&] {
        // V_1 telescopes to the plain trapezoid sum and converges spectrally,
        // so the discretization order is only visible on V_2 = sum w s r.
        const auto shape = make_shape("ellipse:2,1", 1);
        double err[2];
        const auto fine = SphereGrid::circle(512);
        const auto sfine = sample_support(shape, fine);
        SymField tau;
        RadiiField r;
        tau_and_radii(fine, sfine, tau, r);
        const double ref_a = quermassintegrals(fine, sfine, r).V[2];
        for (int pass = 0; pass < 2; ++pass) {
            const auto g = SphereGrid::circle(pass == 0 ? 32 : 64);
            const auto s = sample_support(shape, g);
            tau_and_radii(g, s, tau, r);
            err[pass] = std::abs(quermassintegrals(g, s, r).V[2] - ref_a);
        }
        b.check("error ratio at doubled resolution", err[0] / err[1], 4.0, 0.4);
    });

    b.run("inequality audit on an ellipsoid", [&] {
        const auto g = SphereGrid::sphere(24);
        const auto s = sample_support(make_shape("ellipsoid:1.5,1.2,1.0", 2), g);
        SymField tau;
        RadiiField r;
        tau_and_radii(g, s, tau, r);
        const auto rep = af_audit(quermassintegrals(g, s, r));
        b.check("worst normalized residual >= 0", std::min(rep.worst_normalized, 0.0),
                0.0, 1e-9);
    });

    b.run("ball is a fixed point of the constrained flow", [&] {
        const auto g = SphereGrid::circle(64);
        FlowParams p;
        p.speed = SpeedSpec::power(1, 1.0);
        p.constraint = ConstraintSpec::volume();
        FlowEngine eng(g, p, ScalarField(g.count, 1.3));
        for (int i = 0; i < 50; ++i) eng.advance();
        double worst = 0;
        for (double v : eng.s()) worst = std::max(worst, std::abs(v - 1.3));
        b.check("max |s - 1.3| after 50 steps", worst, 0.0, 1e-13);
    });

    b.run("conservation and descent on a short run", [&] {
        const auto g = SphereGrid::circle(128);
        FlowParams p;
        p.speed = SpeedSpec::power(1, 1.0);
        p.constraint = ConstraintSpec::volume();
        FlowEngine eng(g, p, sample_support(make_shape("ellipse:1.6,1", 1), g));
        const double area0 = eng.Q().V[2];
        double prev_perimeter = eng.Q().V[1];
        double worst_area = 0, worst_perimeter_rise = 0;
        for (int i = 0; i < 200; ++i) {
            eng.advance();
            worst_area = std::max(worst_area, std::abs(eng.Q().V[2] - area0));
            worst_perimeter_rise =
                std::max(worst_perimeter_rise, eng.Q().V[1] - prev_perimeter);
            prev_perimeter = eng.Q().V[1];
        }
        b.check("enclosed-area drift", worst_area, 0.0, 1e-11);
        b.check("per-step perimeter increase", worst_perimeter_rise, 0.0, 1e-12);
    });

    b.run("reflection halfwidth of an offset ball", [&] {
        const auto g = SphereGrid::circle(256);
        const auto s = sample_support(make_shape("ball:1,0.3,0.1", 1), g);
        SymField tau;
        tau_field(g, s, tau);
        const auto X = embed_boundary(g, s);
        const double tol = 5 * interp_error_estimate(g, s, tau);
        const Vec3 z{0.6, 0.8, 0.0};
        b.check("halfwidth equals center . z", reflection_halfwidth(g, s, X, z, tol),
                0.6 * 0.3 + 0.8 * 0.1, tol + 5e-3);
    });

    b.run("curvature-over-support monitor on a ball", [&] {
        const auto g = SphereGrid::circle(128);
        const double r = 1.4, alpha = 2.0;
        const ScalarField s(g.count, r);
        const ScalarField speed(g.count, std::pow(r, -alpha));
        const auto rep = tso_monitor(g, s, speed, Vec3{0, 0, 0}, r);
        b.check("W on a ball", rep.W, (4.0 / 3.0) * std::pow(r, -alpha - 1), 1e-13);
        b.check("margin on a ball is zero", rep.min_margin, 0.0, 1e-13);
    });

    b.run("parallel kernels match the serial reference", [&] {
        const auto g = SphereGrid::sphere(48); // large enough to run threaded
        const auto s = sample_support(make_shape("ellipsoid:1.5,1.2,1.0", 2), g);
        SymField tau_p, tau_r;
        RadiiField rad_p, rad_r;
        tau_and_radii(g, s, tau_p, rad_p);
        ref::tau_and_radii(g, s, tau_r, rad_r);
        double worst = 0;
        for (std::size_t i = 0; i < g.count; ++i)
            worst = std::max({worst, std::abs(tau_p.a11[i] - tau_r.a11[i]),
                              std::abs(tau_p.a12[i] - tau_r.a12[i]),
                              std::abs(tau_p.a22[i] - tau_r.a22[i]),
                              std::abs(rad_p.r1[i] - rad_r.r1[i]),
                              std::abs(rad_p.r2[i] - rad_r.r2[i])});
        b.check("pointwise kernel difference", worst, 0.0, 0.0);
        const auto qp = quermassintegrals(g, s, rad_p);
        const auto qr = ref::quermassintegrals(g, s, rad_r);
        double worst_q = 0;
        for (int j = 0; j <= 3; ++j)
            worst_q = std::max(worst_q, std::abs(qp.V[j] - qr.V[j]) / qr.V[j]);
        b.check("relative reduction difference", worst_q, 0.0, 1e-13);
    });

    if (b.failures == 0)
        out << "all checks passed\n";
    else
        out << b.failures << " check(s) failed\n";
    return b.failures;
}

} // namespace cvx
