#!/usr/bin/env python3
"""Regenerate the frozen reference constants in tests/oracle_constants.hpp.

Every value is computed from closed forms or high-precision quadrature with
mpmath at 40 digits and printed with 17 significant digits (full double
precision).  Run and diff against the header whenever a constant looks
suspicious; the header is the one the tests compile against.
"""

from mpmath import mp, mpf, sqrt, sin, cos, pi, quad, ellipe

mp.dps = 40


def ellipse_support(a, b, t):
    return sqrt(a * a * cos(t) ** 2 + b * b * sin(t) ** 2)


def ellipse_values(a, b):
    # Perimeter via the complete elliptic integral of the second kind.
    m = 1 - (b / a) ** 2
    perimeter = 4 * a * ellipe(m)
    # Radius of curvature in the normal parametrization: r = (ab)^2 / s^3,
    # so the total curvature with respect to the normal angle is
    # integral of s^3 / (ab)^2.
    total_curv = quad(lambda t: ellipse_support(a, b, t) ** 3, [0, 2 * pi]) / (
        (a * b) ** 2
    )
    return perimeter, total_curv


def ellipsoid_values(a, b, c):
    # V1 = integral of the support function over the unit sphere,
    # V2 = surface area = integral of 1/K = (abc)^2 / s^4,
    # V3 = 3 * volume = 4 pi a b c.
    def s(th, ph):
        return sqrt(
            a * a * sin(th) ** 2 * cos(ph) ** 2
            + b * b * sin(th) ** 2 * sin(ph) ** 2
            + c * c * cos(th) ** 2
        )

    v1 = quad(lambda th, ph: s(th, ph) * sin(th), [0, pi], [0, 2 * pi])
    v2 = quad(
        lambda th, ph: (a * b * c) ** 2 / s(th, ph) ** 4 * sin(th),
        [0, pi],
        [0, 2 * pi],
    )
    v3 = 4 * pi * a * b * c
    return v1, v2, v3


def emit(name, value):
    print(f"{name} = {mp.nstr(mpf(value), 17, strip_zeros=False)}")


P, TC = ellipse_values(mpf(2), mpf(1))
emit("ellipse21_perimeter", P)
# Ball radius with the same perimeter (conserved-perimeter limit).
emit("ellipse21_r_quermass", P / (2 * pi))
# Isoperimetric ratio V1^2 / (V0 V2) with V0 = 2 pi, V2 = 2 * area = 4 pi.
emit("ellipse21_iso1", P**2 / (8 * pi**2))
# Sphericity gap V1^2 - V0 V2.
emit("ellipse21_stability", P**2 - 8 * pi**2)
# Hausdorff distance between the ellipse and the centered unit-area-matching
# ball of radius sqrt(2): max over directions of |s - sqrt(2)| = 2 - sqrt(2).
emit("ellipse21_dh_ball", 2 - sqrt(2))
# Balancing term at t = 0, volume constraint, speed = curvature:
# integral of kappa * r dtheta / V1 = 2 pi / P.
emit("ellipse21_phi_volume", 2 * pi / P)
# Total curvature in the normal angle (= integral of the speed for alpha=1).
emit("ellipse21_total_curvature", TC)
# Balancing term at t = 0, perimeter constraint: total curvature / (2 pi).
emit("ellipse21_phi_quermass", TC / (2 * pi))

V1, V2, V3 = ellipsoid_values(mpf("1.5"), mpf("1.2"), mpf(1))
emit("ellipsoid_V1", V1)
emit("ellipsoid_V2", V2)
emit("ellipsoid_V3", V3)
# Ball radius with the same enclosed volume: (abc)^(1/3).
emit("ellipsoid_r_volume", mpf("1.8") ** (mpf(1) / 3))
