#pragma once

#include <cmath>

#include "iwp/params.hpp"

namespace iwp {

/// sgn with sgn(0) = 0, so the friction curve is a total function.
/// Zero velocity belongs to the sticking model, not the curve.
inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

/// Stribeck friction torque acting on the wheel:
///   M_S(w) = r_c sgn(w) + (r_s - r_c) exp(-(w/omega20)^2) sgn(w).
/// Odd in w; |M_S| <= r_s everywhere, approaching r_s as w -> 0+.
inline double stribeck_torque(double omega2, const FrictionParams& fp) {
    const double q = omega2 / fp.omega20;
    return (fp.r_c + (fp.r_s - fp.r_c) * std::exp(-q * q)) * sgn(omega2);
}

/// d/dw of stribeck_torque away from w = 0. At w = 0 the curve jumps; the
/// slope is defined as 0 there (the sticking model owns that point).
inline double stribeck_slope(double omega2, const FrictionParams& fp) {
    if (omega2 == 0.0) return 0.0;
    const double q = omega2 / fp.omega20;
    return (fp.r_s - fp.r_c) * std::exp(-q * q) * (-2.0 * omega2 / (fp.omega20 * fp.omega20)) *
           sgn(omega2);
}

/// Static-friction condition for the wheel: true iff the torque the bearing
/// must hold stays strictly inside the breakaway bound,
///   | theta2/(theta1+theta2) (-a sin phi1 + d1 omega1) + M | < r_s.
/// The boundary value equal to r_s counts as not sticking.
inline bool stiction_holds(double phi1, double omega1, double torque, const MechParams& mp,
                           const FrictionParams& fp) {
    const double held = mp.theta2 / (mp.theta1 + mp.theta2) *
                            (-mp.a * std::sin(phi1) + mp.d1 * omega1) +
                        torque;
    return std::abs(held) < fp.r_s;
}

}  // namespace iwp
