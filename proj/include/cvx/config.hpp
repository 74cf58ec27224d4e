#pragma once
#include <cstdint>
#include <string>

#include "cvx/flow.hpp"
#include "cvx/grid.hpp"
#include "cvx/shapes.hpp"

namespace cvx {

// Flat key = value run description.  Keys: n, k, alpha | mu, constraint,
// resolution, cfl, projection, tol_conv, t_max, snapshot_every, out_dir,
// seed, shape.  `#` starts a comment; unknown keys are rejected.
struct FlowConfig {
    int n = 1, k = 1;
    bool homogeneous = true;
    double alpha = 1.0;
    std::string mu_name; // nonhomogeneous speed id when !homogeneous
    std::string constraint = "volume"; // volume | quermass | general:<theta> | external:<scale>
    std::string resolution = "256";    // N (n=1) or LxM / L (n=2, M defaults to 2L)
    double cfl = 0.2;
    bool projection = true;
    double tol_conv = 1e-4;
    double t_max = 100.0;
    std::size_t snapshot_every = 50;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::string shape = "ball:1.3";
};

FlowConfig parse_config(const std::string& text);
FlowConfig parse_config_file(const std::string& path);

// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const FlowConfig& c);

// Everything needed to construct a FlowEngine, including the quadrature-error
// estimate for audit tolerances (Richardson comparison against the
// half-resolution grid at t = 0).
struct Assembled {
    SphereGrid grid;
    Shape shape;
    ScalarField s0;
    FlowParams params;
};

Assembled assemble(const FlowConfig& c);

} // namespace cvx
