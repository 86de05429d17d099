#pragma once

#include <Eigen/Core>
#include <string>

#include "iwp/dynamics.hpp"
#include "iwp/errors.hpp"
#include "iwp/state.hpp"

namespace iwp {

/// Classical fourth-order Runge-Kutta update of x under the vector field f,
/// with any inputs to f held constant over the step (zero-order hold).
/// Works for State, PhState, PhStateStick and Eigen vectors via vec().
template <class S, class F>
S rk4_step(F&& f, const S& x, double dt) {
    using V = decltype(x.vec());
    const V x0 = x.vec();
    const V k1 = f(x).vec();
    const V k2 = f(S::from_vec(x0 + 0.5 * dt * k1)).vec();
    const V k3 = f(S::from_vec(x0 + 0.5 * dt * k2)).vec();
    const V k4 = f(S::from_vec(x0 + dt * k3)).vec();
    return S::from_vec(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// RK4 step of the switched pendulum model. Throws NumericalError if the
/// result is non-finite, naming the failing step when given an index.
inline State rk4_step_pendulum(Regime regime, const State& x, double torque,
                               const MechParams& mp, const FrictionParams* friction, double dt,
                               long step_index = -1) {
    const State next = rk4_step(
        [&](const State& s) { return regime_drift(regime, s, torque, mp, friction); }, x, dt);
    if (!next.finite()) {
        std::string where = step_index >= 0 ? " at step " + std::to_string(step_index) : "";
        throw NumericalError("integration failure: non-finite state" + where);
    }
    return next;
}

/// One RK4 step together with the Jacobian of the full discrete map,
/// obtained by the chain rule through all four stages (not exp(A dt) of a
/// frozen linearization).
template <int N, class F, class J>
void rk4_step_with_jacobian(F&& f, J&& jac, Eigen::Matrix<double, N, 1>& x,
                            Eigen::Matrix<double, N, N>& transition, double dt) {
    using Vec = Eigen::Matrix<double, N, 1>;
    using Mat = Eigen::Matrix<double, N, N>;
    const Mat eye = Mat::Identity();

    const Vec k1 = f(x);
    const Mat dk1 = jac(x);
    const Vec x2 = x + 0.5 * dt * k1;
    const Vec k2 = f(x2);
    const Mat dk2 = jac(x2) * (eye + 0.5 * dt * dk1);
    const Vec x3 = x + 0.5 * dt * k2;
    const Vec k3 = f(x3);
    const Mat dk3 = jac(x3) * (eye + 0.5 * dt * dk2);
    const Vec x4 = x + dt * k3;
    const Vec k4 = f(x4);
    const Mat dk4 = jac(x4) * (eye + dt * dk3);

    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    transition = eye + (dt / 6.0) * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4);
}

/// Jacobian of the one-step RK4 map of the switched pendulum model.
inline Eigen::Matrix3d pendulum_step_jacobian(Regime regime, const State& x, double torque,
                                              const MechParams& mp,
                                              const FrictionParams* friction, double dt) {
    Eigen::Vector3d v = x.vec();
    Eigen::Matrix3d f;
    rk4_step_with_jacobian<3>(
        [&](const Eigen::Vector3d& s) {
            return regime_drift(regime, State::from_vec(s), torque, mp, friction).vec();
        },
        [&](const Eigen::Vector3d& s) {
            return regime_drift_jacobian(regime, State::from_vec(s), mp, friction);
        },
        v, f, dt);
    return f;
}

}  // namespace iwp
