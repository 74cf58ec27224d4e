#pragma once
#include <cstddef>
#include <vector>

namespace cvx {

using ScalarField = std::vector<double>;

// Symmetric 2-tensor in the orthonormal frame of the round metric.
// For n = 1 only a11 is populated.
struct SymField {
    std::vector<double> a11, a12, a22;
    void resize(std::size_t count, int dim) {
        a11.assign(count, 0.0);
        if (dim == 2) {
            a12.assign(count, 0.0);
            a22.assign(count, 0.0);
        } else {
            a12.clear();
            a22.clear();
        }
    }
};

// Tangent vector field in the orthonormal frame. For n = 1 only c1 is used.
struct VecField {
    std::vector<double> c1, c2;
    void resize(std::size_t count, int dim) {
        c1.assign(count, 0.0);
        if (dim == 2) c2.assign(count, 0.0); else c2.clear();
    }
};

// Principal radii of curvature per node, sorted ascending (r1 <= r2).
// For n = 1 only r1 is used.
struct RadiiField {
    std::vector<double> r1, r2;
    void resize(std::size_t count, int dim) {
        r1.assign(count, 0.0);
        if (dim == 2) r2.assign(count, 0.0); else r2.clear();
    }
};

} // namespace cvx
