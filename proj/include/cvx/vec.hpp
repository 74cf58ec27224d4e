#pragma once
#include <cmath>

namespace cvx {

// Ambient vector. The circle case (n = 1) lives in the z = 0 plane.
struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double a, Vec3 v) { return v *= a; }
inline Vec3 operator*(Vec3 v, double a) { return v *= a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

// Reflection through the hyperplane with unit normal z at offset 0: x - 2(x.z)z.
inline Vec3 reflect(const Vec3& x, const Vec3& zdir) {
    return x - (2.0 * dot(x, zdir)) * zdir;
}

} // namespace cvx
