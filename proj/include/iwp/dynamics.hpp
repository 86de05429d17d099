#pragma once

#include <Eigen/Core>
#include <cmath>

#include "iwp/friction.hpp"
#include "iwp/params.hpp"
#include "iwp/state.hpp"

namespace iwp {

/// Non-sticking vector field (wheel slipping), torque input M:
///   phidot1  = omega1
///   omegadot1 = (a sin phi1 - d1 omega1 + d2 omega2 - M + M_S) / theta1
///   omegadot2 = -(a/theta1) sin phi1 + (d1/theta1) omega1
///               + (M - M_S - d2 omega2) / theta_c
/// with M_S = stribeck_torque(omega2). Pass friction = nullptr for the
/// frictionless variant (M_S = 0).
inline State drift_nonsticking(const State& x, double torque, const MechParams& mp,
                               const FrictionParams* friction) {
    const double ms = friction ? stribeck_torque(x.omega2, *friction) : 0.0;
    const double s = std::sin(x.phi1);
    State dx;
    dx.phi1 = x.omega1;
    dx.omega1 = (mp.a * s - mp.d1 * x.omega1 + mp.d2 * x.omega2 - torque + ms) / mp.theta1;
    dx.omega2 = -(mp.a / mp.theta1) * s + (mp.d1 / mp.theta1) * x.omega1 +
                (torque - ms - mp.d2 * x.omega2) / mp.theta_c();
    return dx;
}

inline State drift_nonsticking(const State& x, double torque, const MechParams& mp,
                               const FrictionParams& fp) {
    return drift_nonsticking(x, torque, mp, &fp);
}

/// Sticking vector field: wheel pinned, torque does not act on the pendulum.
/// The third component is exactly zero, so omega2 is preserved bit-for-bit
/// under any explicit integrator.
inline State drift_sticking(const State& x, const MechParams& mp) {
    State dx;
    dx.phi1 = x.omega1;
    dx.omega1 = (mp.a * std::sin(x.phi1) - mp.d1 * x.omega1) / mp.theta1;
    dx.omega2 = 0.0;
    return dx;
}

/// Jacobian of drift_nonsticking with respect to the state.
inline Eigen::Matrix3d drift_jacobian_nonsticking(const State& x, const MechParams& mp,
                                                  const FrictionParams* friction) {
    const double slope = friction ? stribeck_slope(x.omega2, *friction) : 0.0;
    const double c = std::cos(x.phi1);
    Eigen::Matrix3d j;
    j << 0.0, 1.0, 0.0,                                                      //
        mp.a * c / mp.theta1, -mp.d1 / mp.theta1, (mp.d2 + slope) / mp.theta1,  //
        -mp.a * c / mp.theta1, mp.d1 / mp.theta1, -(mp.d2 + slope) / mp.theta_c();
    return j;
}

/// Jacobian of drift_sticking (third row identically zero).
inline Eigen::Matrix3d drift_jacobian_sticking(const State& x, const MechParams& mp) {
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    j(0, 1) = 1.0;
    j(1, 0) = mp.a * std::cos(x.phi1) / mp.theta1;
    j(1, 1) = -mp.d1 / mp.theta1;
    return j;
}

/// Active vector field of the switched plant.
inline State regime_drift(Regime regime, const State& x, double torque, const MechParams& mp,
                          const FrictionParams* friction) {
    return regime == Regime::NonSticking ? drift_nonsticking(x, torque, mp, friction)
                                         : drift_sticking(x, mp);
}

inline Eigen::Matrix3d regime_drift_jacobian(Regime regime, const State& x, const MechParams& mp,
                                             const FrictionParams* friction) {
    return regime == Regime::NonSticking ? drift_jacobian_nonsticking(x, mp, friction)
                                         : drift_jacobian_sticking(x, mp);
}

/// Measured output: the pendulum angle.
inline double output(const State& x) { return x.phi1; }

}  // namespace iwp
