#pragma once

#include <Eigen/Core>
#include <cmath>

#include "iwp/friction.hpp"
#include "iwp/params.hpp"
#include "iwp/state.hpp"

namespace iwp {

/// Total energy in canonical coordinates:
///   H = (p1-p2)^2/(2 theta1) + p2^2/(2 theta2) + a cos phi1.
/// Bounded below by -a (kinetic part is nonnegative).
inline double hamiltonian(const PhState& z, const MechParams& mp) {
    const double dp = z.p1 - z.p2;
    return dp * dp / (2.0 * mp.theta1) + z.p2 * z.p2 / (2.0 * mp.theta2) +
           mp.a * std::cos(z.phi1);
}

/// Energy of the sticking model: H = p1^2/(2 theta1) + a cos phi1.
inline double hamiltonian_stick(const PhStateStick& z, const MechParams& mp) {
    return z.p1 * z.p1 / (2.0 * mp.theta1) + mp.a * std::cos(z.phi1);
}

/// Energy evaluated on a velocity-coordinate state.
inline double energy(const State& x, const MechParams& mp) {
    return hamiltonian(velocities_to_momenta(x, mp), mp);
}

/// Gradient of the non-sticking Hamiltonian,
///   dH = [-a sin phi1, (p1-p2)/theta1, -(p1-p2)/theta1 + p2/theta2].
/// The second and third entries equal omega1 and omega2.
inline Eigen::Vector3d hamiltonian_gradient(const PhState& z, const MechParams& mp) {
    const double w1 = (z.p1 - z.p2) / mp.theta1;
    return {-mp.a * std::sin(z.phi1), w1, -w1 + z.p2 / mp.theta2};
}

/// Gradient of the sticking Hamiltonian, dH = [-a sin phi1, p1/theta1].
inline Eigen::Vector2d hamiltonian_gradient_stick(const PhStateStick& z, const MechParams& mp) {
    return {-mp.a * std::sin(z.phi1), z.p1 / mp.theta1};
}

/// Structure matrices of the non-sticking canonical form
/// zdot = (J - R) dH^T + G u with u = M - M_S:
///   J = [[0,1,0],[-1,0,0],[0,0,0]],  R = diag(0,d1,d2),  G = [0,0,1]^T.
inline PhState ph_drift(const PhState& z, double u, const MechParams& mp) {
    const Eigen::Vector3d g = hamiltonian_gradient(z, mp);
    PhState dz;
    dz.phi1 = g[1];
    dz.p1 = -g[0] - mp.d1 * g[1];
    dz.p2 = -mp.d2 * g[2] + u;
    return dz;
}

/// Sticking canonical form, J = [[0,1],[-1,0]], R = diag(0,d1), no input
/// channel. The damping sits in the momentum row so that phidot1 = p1/theta1
/// reproduces the sticking vector field through the Legendre map.
inline PhStateStick ph_drift_stick(const PhStateStick& z, const MechParams& mp) {
    const Eigen::Vector2d g = hamiltonian_gradient_stick(z, mp);
    PhStateStick dz;
    dz.phi1 = g[1];
    dz.p1 = -g[0] - mp.d1 * g[1];
    return dz;
}

/// Canonical drift of the physical plant with torque input M: evaluates the
/// friction torque at the state's own wheel velocity and feeds u = M - M_S.
inline PhState ph_plant_drift(const PhState& z, double torque, const MechParams& mp,
                              const FrictionParams* friction) {
    double u = torque;
    if (friction) {
        const double w2 = momenta_to_velocities(z, mp).omega2;
        u -= stribeck_torque(w2, *friction);
    }
    return ph_drift(z, u, mp);
}

}  // namespace iwp
