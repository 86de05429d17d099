#pragma once

#include <cmath>

#include "iwp/errors.hpp"
#include "iwp/observer.hpp"
#include "iwp/ph.hpp"
#include "iwp/rk4.hpp"

namespace iwp {

/// Tuning of the passivity-based observer: alpha weights the angle error in
/// the desired error Hamiltonian, beta is the injected damping gain. Both
/// must be positive for H_d > 0 and R_d = R + diag(beta, 0, 0) > 0.
struct NopDesign {
    double alpha;
    double beta;

    NopDesign(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw InputError("NopDesign: alpha and beta must be > 0");
    }
};

/// Desired error Hamiltonian of the non-sticking observer,
///   H_d(e) = (alpha/2) phi~^2 + (p1~-p2~)^2/(2 theta1) + p2~^2/(2 theta2),
/// evaluated on the canonical-coordinate error e = z - z_hat.
inline double error_hamiltonian(const PhState& e, const NopDesign& d, const MechParams& mp) {
    const double dp = e.p1 - e.p2;
    return 0.5 * d.alpha * e.phi1 * e.phi1 + dp * dp / (2.0 * mp.theta1) +
           e.p2 * e.p2 / (2.0 * mp.theta2);
}

/// Sticking counterpart, H_d(e) = (alpha/2) phi~^2 + p1~^2/(2 theta1).
inline double error_hamiltonian_stick(const PhStateStick& e, const NopDesign& d,
                                      const MechParams& mp) {
    return 0.5 * d.alpha * e.phi1 * e.phi1 + e.p1 * e.p1 / (2.0 * mp.theta1);
}

/// The compensation term has a single nonzero entry, in the phi1-gradient
/// slot; the momentum entries of dH(x) - dH(x_hat) - dH_d(e) cancel because
/// the three functions share the same kinetic quadratic form. It therefore
/// depends on the measured angle and the estimate only:
///   Phi_1 = -a sin y + a sin phi1_hat - alpha (y - phi1_hat).
inline double nop_compensation(double phi1_hat, double y, const NopDesign& d,
                               const MechParams& mp) {
    return -mp.a * std::sin(y) + mp.a * std::sin(phi1_hat) - d.alpha * (y - phi1_hat);
}

/// Observer vector field for the non-sticking model,
///   zdot = (J - R)(dH(z) + Phi)^T + G u - G_o u_o,
/// with damping injection G_o u_o = -beta * alpha (y - phi1_hat) in the first
/// row. u is the effective input M - M_S.
inline PhState nop_drift(const PhState& z_hat, double u, double y, const NopDesign& d,
                         const MechParams& mp) {
    const Eigen::Vector3d grad = hamiltonian_gradient(z_hat, mp);
    const double g1 = grad[0] + nop_compensation(z_hat.phi1, y, d, mp);
    PhState dz;
    dz.phi1 = grad[1] + d.beta * d.alpha * (y - z_hat.phi1);
    dz.p1 = -g1 - mp.d1 * grad[1];
    dz.p2 = -mp.d2 * grad[2] + u;
    return dz;
}

/// Observer vector field for the sticking model (no input channel).
inline PhStateStick nop_drift_stick(const PhStateStick& z_hat, double y, const NopDesign& d,
                                    const MechParams& mp) {
    const Eigen::Vector2d grad = hamiltonian_gradient_stick(z_hat, mp);
    const double g1 = grad[0] + nop_compensation(z_hat.phi1, y, d, mp);
    PhStateStick dz;
    dz.phi1 = grad[1] + d.beta * d.alpha * (y - z_hat.phi1);
    dz.p1 = -g1 - mp.d1 * grad[1];
    return dz;
}

/// Passivity-based observer. Runs in canonical coordinates internally and
/// converts to velocity coordinates at the interface; integrated
/// quasi-continuously (one RK4 step per sample with the measurement held).
class NopObserver {
  public:
    NopObserver(const NopDesign& design, const MechParams& mp, const FrictionParams& fp,
                const State& x0, bool friction_in_input = true,
                WheelStickPolicy stick_policy = WheelStickPolicy::Hold)
        : design_(design), mp_(mp), fp_(fp), x_hat_(x0),
          friction_in_input_(friction_in_input), stick_policy_(stick_policy) {}

    State step(Regime regime, double torque, double y, double dt) {
        if (stick_policy_ == WheelStickPolicy::Zero && regime == Regime::Sticking &&
            last_regime_ == Regime::NonSticking)
            x_hat_.omega2 = 0.0;

        if (regime == Regime::NonSticking) {
            const PhState z0 = velocities_to_momenta(x_hat_, mp_);
            const PhState z = rk4_step(
                [&](const PhState& z_hat) {
                    double u = torque;
                    if (friction_in_input_)
                        u -= stribeck_torque(momenta_to_velocities(z_hat, mp_).omega2, fp_);
                    return nop_drift(z_hat, u, y, design_, mp_);
                },
                z0, dt);
            x_hat_ = momenta_to_velocities(z, mp_);
        } else {
            const PhStateStick z0{x_hat_.phi1, mp_.theta1 * x_hat_.omega1};
            const PhStateStick z = rk4_step(
                [&](const PhStateStick& z_hat) {
                    return nop_drift_stick(z_hat, y, design_, mp_);
                },
                z0, dt);
            x_hat_.phi1 = z.phi1;
            x_hat_.omega1 = z.p1 / mp_.theta1;
        }

        if (!x_hat_.finite()) throw NumericalError("nop diverged: non-finite estimate");
        last_regime_ = regime;
        return x_hat_;
    }

    const State& estimate() const { return x_hat_; }
    const NopDesign& design() const { return design_; }

  private:
    NopDesign design_;
    MechParams mp_;
    FrictionParams fp_;
    State x_hat_;
    bool friction_in_input_;
    WheelStickPolicy stick_policy_;
    Regime last_regime_ = Regime::NonSticking;
};

}  // namespace iwp
