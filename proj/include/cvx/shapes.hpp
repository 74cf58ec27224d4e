#pragma once
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cvx/fields.hpp"
#include "cvx/grid.hpp"

namespace cvx {

// A convex body given by its support function on unit directions.
struct Shape {
    std::string spec; // canonical catalog string
    std::function<double(const Vec3&)> support;
};

// Parse a catalog string.  Grammar (dim = 1 or 2):
//   ball:r                     centered ball
//   ball:r,cx,cy[,cz]          off-center ball (cz only for dim = 2)
//   ellipse:a,b                dim = 1
//   ellipsoid:a,b,c            dim = 2
//   pcube:p,scale              unit ball of the l^p norm (p > 1), scaled;
//                              support = scale * l^q norm, q = p/(p-1)
//   perturbed-ball:r,m,amp     r(1 + amp cos(m theta))       (dim = 1)
//                              r(1 + amp P_m(cos theta))     (dim = 2, zonal)
//   A + B                      Minkowski sum (supports add)
// Parameter errors throw InvalidConfig.  Convexity is NOT checked here; it is
// enforced where the shape is sampled into a flow.
Shape make_shape(std::string_view spec, int dim);

// Evaluate the support function at every grid node.
ScalarField sample_support(const Shape& shape, const SphereGrid& g);

// Random member of the catalog with parameters kept inside convexity-safe
// ranges (except that pcube curvature degenerates at the axis directions by
// construction; it stays strictly convex).
Shape random_catalog_shape(std::mt19937_64& rng, int dim);

// One line per catalog family, for the command-line `shapes` listing.
std::vector<std::string> catalog_summary();

} // namespace cvx
