#pragma once

#include <string>

#include "cvx/diagnostics.hpp"
#include "cvx/fields.hpp"
#include "cvx/grid.hpp"

namespace cvx {

// CSV time series, one row per record, 17 significant digits.  Columns:
// t, V0..V_{n+1}, r1..r_{n+1}, I_iso, phi, Ek_min, Ek_max, rho_minus,
// rho_plus, steiner_x, steiner_y[, steiner_z], d_ball, tso_W, ekflat.
// Deep-diagnostic columns hold nan on records where they were not measured.
void export_timeseries(const Trajectory& traj, const std::string& path);

// Closed boundary polyline of the embedded curve plus its best-fit circle
// (Steiner center, mean radius).  n = 1 only.
void export_svg(const SphereGrid& g, const ScalarField& s,
                const std::string& path);

// Watertight triangle mesh of the embedded surface in OBJ format, with two
// extra pole vertices extrapolated from the first two latitude rings.
// n = 2 only.
void export_mesh(const SphereGrid& g, const ScalarField& s,
                 const std::string& path);

} // namespace cvx
