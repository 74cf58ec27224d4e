#pragma once
#include <span>
#include <vector>

#include "cvx/fields.hpp"
#include "cvx/grid.hpp"

namespace cvx {

// tau = covariant Hessian of s plus s times the identity, in the orthonormal
// frame of the round metric.  Its eigenvalues are the principal radii of
// curvature of the body with support function s; positivity is strict
// convexity.
void tau_field(const SphereGrid& g, std::span<const double> s, SymField& tau);

// Gradient of s in the orthonormal frame (used by the boundary embedding).
void gradient_field(const SphereGrid& g, std::span<const double> s, VecField& grad);

// Eigenvalues of tau, sorted ascending per node.
void principal_radii(const SphereGrid& g, const SymField& tau, RadiiField& r);

// Fused pass: tau and radii in one sweep over the nodes.
void tau_and_radii(const SphereGrid& g, std::span<const double> s, SymField& tau,
                   RadiiField& r);

// Normalized k-th elementary symmetric function of the principal curvatures
// kappa_i = 1/r_i (E_0 = 1).  n is the grid dimension.
double ek_from_radii(int n, int k, double r1, double r2);
// Product of the principal radii: density of the surface measure against the
// sphere measure under the normal parametrization.
double sigma_n_from_radii(int n, double r1, double r2);

// Per-node E_k field.
void ek_field(const SphereGrid& g, int k, const RadiiField& r, ScalarField& out);

// Boundary embedding X = s z + grad s (tangential lift).
std::vector<Vec3> embed_boundary(const SphereGrid& g, std::span<const double> s);

// Default strict-convexity margin: 1e-8 times the quadrature mean of s.
double epsilon_convex(const SphereGrid& g, std::span<const double> s);

// Throws NonConvexInput (initial = true) or LossOfConvexity (false) when the
// smallest principal radius does not exceed eps.
void require_strictly_convex(const SphereGrid& g, const RadiiField& r, double eps,
                             bool initial);

namespace ref {
// Serial reference twins used by the consistency tests and the benchmark.
void tau_field(const SphereGrid& g, std::span<const double> s, SymField& tau);
void tau_and_radii(const SphereGrid& g, std::span<const double> s, SymField& tau,
                   RadiiField& r);
} // namespace ref

} // namespace cvx
