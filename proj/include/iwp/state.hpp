#pragma once

#include <Eigen/Core>
#include <cmath>

#include "iwp/params.hpp"

namespace iwp {

/// Which of the two plant models is active.
enum class Regime : int {
    NonSticking = 1,  ///< wheel slips on its bearing (3-state dynamics)
    Sticking = 2,     ///< wheel held by static friction (omega2 pinned)
};

inline int regime_tag(Regime r) { return static_cast<int>(r); }

/// Plant/estimation state [phi1, omega1, omega2].
///
/// phi1 is the absolute pendulum angle and is never wrapped; it accumulates
/// full revolutions.
struct State {
    double phi1 = 0.0;    ///< pendulum angle [rad]
    double omega1 = 0.0;  ///< pendulum angular velocity [rad/s]
    double omega2 = 0.0;  ///< wheel angular velocity, relative [rad/s]

    Eigen::Vector3d vec() const { return {phi1, omega1, omega2}; }
    static State from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

    bool finite() const {
        return std::isfinite(phi1) && std::isfinite(omega1) && std::isfinite(omega2);
    }
};

/// State in canonical coordinates [phi1, p1, p2] (non-sticking model).
struct PhState {
    double phi1 = 0.0;  ///< pendulum angle [rad]
    double p1 = 0.0;    ///< momentum conjugate to phi1 [kg m^2 / s]
    double p2 = 0.0;    ///< momentum conjugate to phi2 [kg m^2 / s]

    Eigen::Vector3d vec() const { return {phi1, p1, p2}; }
    static PhState from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// State in canonical coordinates [phi1, p1] of the sticking model,
/// where p1 = theta1 * omega1.
struct PhStateStick {
    double phi1 = 0.0;
    double p1 = 0.0;

    Eigen::Vector2d vec() const { return {phi1, p1}; }
    static PhStateStick from_vec(const Eigen::Vector2d& v) { return {v[0], v[1]}; }
};

/// Legendre map: velocities to generalized momenta.
/// p1 = (theta1+theta2) omega1 + theta2 omega2,  p2 = theta2 (omega1+omega2).
inline PhState velocities_to_momenta(const State& x, const MechParams& mp) {
    PhState z;
    z.phi1 = x.phi1;
    z.p1 = (mp.theta1 + mp.theta2) * x.omega1 + mp.theta2 * x.omega2;
    z.p2 = mp.theta2 * (x.omega1 + x.omega2);
    return z;
}

/// Inverse Legendre map. The mass matrix is regular, so this composes with
/// velocities_to_momenta to the identity.
inline State momenta_to_velocities(const PhState& z, const MechParams& mp) {
    State x;
    x.phi1 = z.phi1;
    x.omega1 = (z.p1 - z.p2) / mp.theta1;
    x.omega2 = -(z.p1 - z.p2) / mp.theta1 + z.p2 / mp.theta2;
    return x;
}

}  // namespace iwp
