#pragma once

#include <cmath>

#include "iwp/errors.hpp"

namespace iwp {

/// Mechanical constants of the inertia wheel pendulum.
///
/// theta_c is derived from theta1/theta2 on construction and is never set
/// directly; keeping it out of the inputs avoids inconsistent triples.
struct MechParams {
    double a;       ///< gravity torque coefficient [kg m^2 / s^2]
    double theta1;  ///< inertia of the pendulum subsystem [kg m^2]
    double theta2;  ///< inertia of the wheel [kg m^2]
    double d1;      ///< viscous damping, pendulum axis [kg m^2 / s]
    double d2;      ///< viscous damping, wheel axis [kg m^2 / s]

    MechParams(double a_, double theta1_, double theta2_, double d1_, double d2_)
        : a(a_), theta1(theta1_), theta2(theta2_), d1(d1_), d2(d2_) {
        if (!(a > 0.0) || !(theta1 > 0.0) || !(theta2 > 0.0))
            throw InputError("MechParams: a, theta1, theta2 must be > 0");
        if (!(d1 >= 0.0) || !(d2 >= 0.0))
            throw InputError("MechParams: d1, d2 must be >= 0");
    }

    /// theta1*theta2/(theta1+theta2), the reduced inertia of the wheel axis.
    double theta_c() const { return theta1 * theta2 / (theta1 + theta2); }

    /// Identified values of the laboratory rig.
    static MechParams lab() {
        return MechParams(0.15535, 0.05045, 0.00113, 0.00885, 0.00015);
    }
};

/// Stribeck static-friction parameters of the wheel bearing.
struct FrictionParams {
    double r_c;      ///< Coulomb friction torque [kg m^2 / s^2]
    double r_s;      ///< stiction (breakaway) torque [kg m^2 / s^2]
    double omega20;  ///< Stribeck reference velocity [1/s]

    FrictionParams(double r_c_, double r_s_, double omega20_)
        : r_c(r_c_), r_s(r_s_), omega20(omega20_) {
        if (!(r_c > 0.0) || !(r_s >= r_c))
            throw InputError("FrictionParams: need 0 < r_c <= r_s");
        if (!(omega20 > 0.0)) throw InputError("FrictionParams: omega20 must be > 0");
    }

    /// Identified values of the laboratory rig.
    static FrictionParams lab() { return FrictionParams(0.0024, 0.0026, 0.0501); }
};

}  // namespace iwp
