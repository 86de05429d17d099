#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "iwp/dynamics.hpp"
#include "iwp/errors.hpp"
#include "iwp/observer.hpp"
#include "iwp/rk4.hpp"

namespace iwp {
namespace kalman {

/// Gaussian belief over an N-dimensional state.
template <int N>
struct Belief {
    Eigen::Matrix<double, N, 1> x;
    Eigen::Matrix<double, N, N> p;
};

/// Prediction: propagate the mean one RK4 step and the covariance through
/// the Jacobian of the full discrete map, P <- F P F^T + Q.
template <int N, class Drift, class Jac>
void predict(Belief<N>& b, Drift&& f, Jac&& jac, const Eigen::Matrix<double, N, N>& q,
             double dt) {
    Eigen::Matrix<double, N, N> transition;
    rk4_step_with_jacobian<N>(f, jac, b.x, transition, dt);
    b.p = transition * b.p * transition.transpose() + q;
}

/// Scalar measurement update with output row h and variance r. Returns the
/// innovation. The posterior covariance is re-symmetrized.
template <int N>
double update(Belief<N>& b, const Eigen::Matrix<double, 1, N>& h, double r, double y) {
    const double s = (h * b.p * h.transpose())(0, 0) + r;
    if (!(s > 0.0)) throw DesignError("kalman update: innovation covariance not invertible");
    const Eigen::Matrix<double, N, 1> gain = b.p * h.transpose() / s;
    const double innovation = y - (h * b.x)(0, 0);
    b.x += gain * innovation;
    b.p -= gain * (h * b.p);
    b.p = (0.5 * (b.p + b.p.transpose())).eval();
    return innovation;
}

}  // namespace kalman

/// Extended Kalman filter for the switched pendulum, measuring phi1 only.
/// One step = predict under the active model, then update. The covariance is
/// carried unchanged across regime switches. Symmetry and near-PSD of P are
/// enforced every step.
class PendulumEkf {
  public:
    PendulumEkf(const MechParams& mp, const FrictionParams& fp, const State& x0,
                const Eigen::Matrix3d& p0, const Eigen::Matrix3d& q, double r_var,
                WheelStickPolicy stick_policy = WheelStickPolicy::Hold)
        : mp_(mp), fp_(fp), belief_{x0.vec(), p0}, q_(q), r_(r_var),
          stick_policy_(stick_policy) {
        if (!(r_var > 0.0)) throw InputError("PendulumEkf: r_var must be > 0");
        check_covariance();
    }

    /// Advance one sample: y is the measured angle, torque the input held
    /// over the step.
    State step(Regime regime, double torque, double y, double dt) {
        apply_stick_policy(regime);

        kalman::predict<3>(
            belief_,
            [&](const Eigen::Vector3d& s) {
                return regime_drift(regime, State::from_vec(s), torque, mp_, &fp_).vec();
            },
            [&](const Eigen::Vector3d& s) {
                return regime_drift_jacobian(regime, State::from_vec(s), mp_, &fp_);
            },
            q_, dt);

        Eigen::Matrix<double, 1, 3> h;
        h << 1.0, 0.0, 0.0;
        kalman::update<3>(belief_, h, r_, y);

        if (!belief_.x.allFinite()) throw NumericalError("ekf diverged: non-finite estimate");
        check_covariance();
        last_regime_ = regime;
        return estimate();
    }

    State estimate() const { return State::from_vec(belief_.x); }
    const Eigen::Matrix3d& covariance() const { return belief_.p; }

    void set_estimate(const State& x) { belief_.x = x.vec(); }

  private:
    void apply_stick_policy(Regime regime) {
        if (stick_policy_ == WheelStickPolicy::Zero && regime == Regime::Sticking &&
            last_regime_ == Regime::NonSticking)
            belief_.x[2] = 0.0;
    }

    void check_covariance() const {
        const Eigen::Matrix3d& p = belief_.p;
        if (!p.allFinite()) throw NumericalError("ekf diverged: non-finite covariance");
        if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-9)
            throw NumericalError("ekf covariance lost symmetry");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(p);
        if (eig.eigenvalues().minCoeff() < -1e-10)
            throw NumericalError("ekf covariance lost positive semidefiniteness");
    }

    MechParams mp_;
    FrictionParams fp_;
    kalman::Belief<3> belief_;
    Eigen::Matrix3d q_;
    double r_;
    WheelStickPolicy stick_policy_;
    Regime last_regime_ = Regime::NonSticking;
};

/// Jacobian of the discrete one-step map of the active model; exposed for
/// verification against finite differences.
inline Eigen::Matrix3d ekf_jacobian(Regime regime, const State& x, double torque,
                                    const MechParams& mp, const FrictionParams& fp, double dt) {
    return pendulum_step_jacobian(regime, x, torque, mp, &fp, dt);
}

}  // namespace iwp
