#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "iwp/discretize.hpp"
#include "iwp/dynamics.hpp"
#include "iwp/errors.hpp"
#include "iwp/observer.hpp"

namespace iwp {

enum class NolMode {
    SampledData,      ///< x_{k+1} = A_d x_k + G_d alpha(u_k, y_k) + K_d (y_k - C x_k)
    QuasiContinuous,  ///< RK4 step of xdot = A x + alpha(u, y) + K (y - C x)
};

/// Linear part of the non-sticking model in the output-injection
/// decomposition xdot = A x + alpha(u, y).
inline Eigen::Matrix3d nol_system_matrix_nonstick(const MechParams& mp) {
    Eigen::Matrix3d a;
    a << 0.0, 1.0, 0.0,                                      //
        0.0, -mp.d1 / mp.theta1, mp.d2 / mp.theta1,          //
        0.0, mp.d1 / mp.theta1, -mp.d2 / mp.theta_c();
    return a;
}

/// Linear part of the sticking model (phi1, omega1 only).
inline Eigen::Matrix2d nol_system_matrix_stick(const MechParams& mp) {
    Eigen::Matrix2d a;
    a << 0.0, 1.0, 0.0, -mp.d1 / mp.theta1;
    return a;
}

/// Nonlinear injection of the non-sticking model; depends on the output and
/// the effective input u = M - M_S only.
inline Eigen::Vector3d nol_injection_nonstick(double y, double u_eff, const MechParams& mp) {
    const double s = mp.a * std::sin(y);
    return {0.0, (s - u_eff) / mp.theta1, -s / mp.theta1 + u_eff / mp.theta_c()};
}

/// Nonlinear injection of the sticking model (no input channel).
inline Eigen::Vector2d nol_injection_stick(double y, const MechParams& mp) {
    return {0.0, mp.a * std::sin(y) / mp.theta1};
}

/// Designed matrices and gain for one regime. The sampled recursion keeps an
/// extended-precision copy of the gain: dead-beat cancellation pushes
/// intermediate estimates to the 1e8 scale, where double resolution is only
/// ~1e-8 and the nilpotent collapse would be lost to rounding.
template <int N>
struct NolRegimeDesign {
    Eigen::Matrix<double, N, N> a;
    Eigen::Matrix<double, 1, N> c;
    Eigen::Matrix<double, N, N> a_d;
    Eigen::Matrix<double, N, N> g_d;
    Eigen::Matrix<double, N, 1> gain;            ///< K_d (sampled) or K (quasi-continuous)
    Eigen::Matrix<long double, N, 1> gain_x;     ///< extended-precision K_d
};

/// Complete observer design for both regimes.
struct NolDesign {
    NolMode mode;
    double dt;
    NolRegimeDesign<3> nonstick;
    NolRegimeDesign<2> stick;
};

namespace detail {

template <int N>
NolRegimeDesign<N> design_regime(const Eigen::Matrix<double, N, N>& a,
                                 const Eigen::Matrix<double, 1, N>& c, NolMode mode, double dt,
                                 const std::optional<Eigen::Matrix<double, N, 1>>& poles) {
    NolRegimeDesign<N> d;
    d.a = a;
    d.c = c;
    if (!observable<N>(a, c)) throw DesignError("nol_design: (A, C) pair not observable");
    zoh_discretize<N>(a, dt, d.a_d, d.g_d);

    if (mode == NolMode::QuasiContinuous) {
        if (!poles) throw DesignError("nol_design: quasi-continuous mode needs poles");
        d.gain_x = place_observer_gain_precise<N>(a, c, *poles);
        d.gain = d.gain_x.template cast<double>();
        const auto eigs = (a - d.gain * c).eigenvalues();
        if (eigs.real().maxCoeff() >= 0.0)
            throw DesignError("nol_design: continuous error dynamics not Hurwitz");
    } else if (poles) {
        // continuous pole spec mapped onto the sampled grid, z = exp(lambda dt)
        Eigen::Matrix<double, N, 1> z;
        for (int i = 0; i < N; ++i) z[i] = std::exp((*poles)[i] * dt);
        d.gain_x = place_observer_gain_precise<N>(d.a_d, c, z);
        d.gain = d.gain_x.template cast<double>();
        if ((d.a_d - d.gain * c).eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
            throw DesignError("nol_design: discrete error dynamics not Schur");
    } else {
        d.gain_x = deadbeat_observer_gain_precise<N>(d.a_d, c);
        d.gain = d.gain_x.template cast<double>();
    }
    return d;
}

}  // namespace detail

/// Build the observer design for both regimes. Without pole lists the
/// sampled-data design is dead-beat (all discrete error eigenvalues at the
/// origin); quasi-continuous mode requires pole lists.
inline NolDesign nol_design(const MechParams& mp, NolMode mode, double dt,
                            std::optional<Eigen::Vector3d> poles_nonstick = std::nullopt,
                            std::optional<Eigen::Vector2d> poles_stick = std::nullopt) {
    if (!(dt > 0.0)) throw InputError("nol_design: dt must be > 0");
    NolDesign d;
    d.mode = mode;
    d.dt = dt;
    Eigen::Matrix<double, 1, 3> c3;
    c3 << 1.0, 0.0, 0.0;
    Eigen::Matrix<double, 1, 2> c2;
    c2 << 1.0, 0.0;
    d.nonstick = detail::design_regime<3>(nol_system_matrix_nonstick(mp), c3, mode, dt,
                                          poles_nonstick);
    d.stick = detail::design_regime<2>(nol_system_matrix_stick(mp), c2, mode, dt, poles_stick);
    return d;
}

/// Output-injection observer over the switched model. Carries the full
/// 3-state estimate; while the sticking model is selected only (phi1, omega1)
/// are advanced and the wheel estimate follows the configured policy.
class NolObserver {
  public:
    NolObserver(NolDesign design, const MechParams& mp, const FrictionParams& fp,
                const State& x0, bool friction_in_injection = true,
                WheelStickPolicy stick_policy = WheelStickPolicy::Hold)
        : design_(std::move(design)), mp_(mp), fp_(fp), x_hat_(x0),
          x_x_(x0.vec().cast<long double>()),
          friction_in_injection_(friction_in_injection), stick_policy_(stick_policy) {}

    State step(Regime regime, double torque, double y, double dt) {
        if (design_.mode == NolMode::SampledData && std::abs(dt - design_.dt) > 1e-12 * design_.dt)
            throw InputError("nol step: sample time differs from design dt");
        if (stick_policy_ == WheelStickPolicy::Zero && regime == Regime::Sticking &&
            last_regime_ == Regime::NonSticking) {
            x_hat_.omega2 = 0.0;
            x_x_[2] = 0.0L;
        }

        if (regime == Regime::NonSticking)
            step_nonstick(torque, y, dt);
        else
            step_stick(y, dt);

        if (!x_hat_.finite()) throw NumericalError("nol diverged: non-finite estimate");
        last_regime_ = regime;
        return x_hat_;
    }

    const State& estimate() const { return x_hat_; }
    const NolDesign& design() const { return design_; }

  private:
    double effective_input(double torque, double omega2_hat) const {
        return friction_in_injection_ ? torque - stribeck_torque(omega2_hat, fp_) : torque;
    }

    // Sampled recursion in extended precision: the exposed estimate is the
    // rounded view of x_x_, which carries the sub-ulp information the
    // dead-beat cancellation needs across steps.
    void step_nonstick(double torque, double y, double dt) {
        const NolRegimeDesign<3>& d = design_.nonstick;
        if (design_.mode == NolMode::SampledData) {
            const Eigen::Vector3d alpha = nol_injection_nonstick(
                y, effective_input(torque, static_cast<double>(x_x_[2])), mp_);
            x_x_ = d.a_d.cast<long double>() * x_x_ + d.g_d.cast<long double>() * alpha.cast<long double>() +
                   d.gain_x * (static_cast<long double>(y) - x_x_[0]);
        } else {
            auto f = [&](const Eigen::Vector3d& s) -> Eigen::Vector3d {
                const Eigen::Vector3d alpha =
                    nol_injection_nonstick(y, effective_input(torque, s[2]), mp_);
                return d.a * s + alpha + d.gain * (y - (d.c * s)(0, 0));
            };
            x_x_ = rk4_vec<3>(f, x_x_.cast<double>().eval(), dt).cast<long double>();
        }
        x_hat_ = State::from_vec(x_x_.cast<double>());
    }

    void step_stick(double y, double dt) {
        const NolRegimeDesign<2>& d = design_.stick;
        Eigen::Matrix<long double, 2, 1> x = x_x_.head<2>();
        if (design_.mode == NolMode::SampledData) {
            x = d.a_d.cast<long double>() * x +
                d.g_d.cast<long double>() * nol_injection_stick(y, mp_).cast<long double>() +
                d.gain_x * (static_cast<long double>(y) - x[0]);
        } else {
            auto f = [&](const Eigen::Vector2d& s) -> Eigen::Vector2d {
                return d.a * s + nol_injection_stick(y, mp_) + d.gain * (y - (d.c * s)(0, 0));
            };
            x = rk4_vec<2>(f, x.cast<double>().eval(), dt).cast<long double>();
        }
        x_x_[0] = x[0];
        x_x_[1] = x[1];
        x_hat_.phi1 = static_cast<double>(x[0]);
        x_hat_.omega1 = static_cast<double>(x[1]);
    }

    template <int N, class F>
    static Eigen::Matrix<double, N, 1> rk4_vec(F&& f, const Eigen::Matrix<double, N, 1>& x,
                                               double dt) {
        const auto k1 = f(x);
        const auto k2 = f((x + 0.5 * dt * k1).eval());
        const auto k3 = f((x + 0.5 * dt * k2).eval());
        const auto k4 = f((x + dt * k3).eval());
        return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    NolDesign design_;
    MechParams mp_;
    FrictionParams fp_;
    State x_hat_;
    Eigen::Matrix<long double, 3, 1> x_x_;
    bool friction_in_injection_;
    WheelStickPolicy stick_policy_;
    Regime last_regime_ = Regime::NonSticking;
};

}  // namespace iwp
