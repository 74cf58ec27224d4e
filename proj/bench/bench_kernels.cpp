#include <chrono>
#include <cstdio>

#include "cvx/grid.hpp"
#include "cvx/mixed_volumes.hpp"
#include "cvx/shapes.hpp"
#include "cvx/support_geometry.hpp"

using namespace cvx;
using clk = std::chrono::steady_clock;

namespace {

double ms(clk::time_point a, clk::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

template <class F>
double best_of(int reps, F&& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clk::now();
        body();
        const auto t1 = clk::now();
        best = std::min(best, ms(t0, t1));
    }
    return best;
}

volatile double sink;

void bench_grid(const SphereGrid& g, const char* label, const Shape& shape) {
    const auto s = sample_support(shape, g);
    SymField tau;
    RadiiField r;
    const int reps = 7;

    const double t_par = best_of(reps, [&] { tau_and_radii(g, s, tau, r); });
    const double t_ser = best_of(reps, [&] { ref::tau_and_radii(g, s, tau, r); });
    const double q_par = best_of(reps, [&] { sink = quermassintegrals(g, s, r).V[1]; });
    const double q_ser =
        best_of(reps, [&] { sink = ref::quermassintegrals(g, s, r).V[1]; });
    const double i_par = best_of(reps, [&] { sink = integrate(g, s); });
    const double i_ser = best_of(reps, [&] { sink = ref::integrate(g, s); });

    std::printf("%s (%zu nodes)\n", label, g.count);
    std::printf("  %-22s parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n",
                "curvature tensor", t_par, t_ser, t_ser / t_par);
    std::printf("  %-22s parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n",
                "quermassintegrals", q_par, q_ser, q_ser / q_par);
    std::printf("  %-22s parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n",
                "plain quadrature", i_par, i_ser, i_ser / i_par);
}

} // namespace

int main() {
    bench_grid(SphereGrid::circle(1 << 16), "circle", make_shape("ellipse:2,1", 1));
    bench_grid(SphereGrid::sphere(128), "sphere",
               make_shape("ellipsoid:1.5,1.2,1.0", 2));
    return 0;
}
