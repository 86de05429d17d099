#pragma once

#include <cmath>

#include "iwp/dynamics.hpp"
#include "iwp/errors.hpp"
#include "iwp/rk4.hpp"

namespace iwp {

/// What the selector returns when the Bayes factor is exactly 1 (within
/// 1e-12): neither model explains the measurement better.
enum class TiePolicy {
    KeepCurrent,
    PreferNonSticking,
    PreferSticking,
};

struct SelectorConfig {
    double r_var = 0.001;      ///< measurement-noise variance of the Gaussian density
    double prior_ratio = 1.0;  ///< Pr(M1)/Pr(M2)
    TiePolicy tie_policy = TiePolicy::KeepCurrent;

    void validate() const {
        if (!(r_var > 0.0)) throw InputError("SelectorConfig: r_var must be > 0");
        if (!(prior_ratio > 0.0)) throw InputError("SelectorConfig: prior_ratio must be > 0");
    }
};

/// One-step-ahead prediction of the measured angle under the given model:
/// noise-free RK4 propagation of the previous estimate.
inline double predict_output(const State& x_prev, Regime regime, double torque, double dt,
                             const MechParams& mp, const FrictionParams& fp) {
    return rk4_step_pendulum(regime, x_prev, torque, mp, &fp, dt).phi1;
}

/// Log of the Gaussian predictive density of measurement y under the model.
/// Densities are carried in the log domain: residuals of a few rad with
/// r_var around 1e-3 underflow the direct density.
inline double log_predictive_likelihood(double y, const State& x_prev, Regime regime,
                                        double torque, double dt, const SelectorConfig& cfg,
                                        const MechParams& mp, const FrictionParams& fp) {
    const double resid = y - predict_output(x_prev, regime, torque, dt, mp, fp);
    return -0.5 * std::log(2.0 * M_PI * cfg.r_var) - resid * resid / (2.0 * cfg.r_var);
}

inline double predictive_likelihood(double y, const State& x_prev, Regime regime, double torque,
                                    double dt, const SelectorConfig& cfg, const MechParams& mp,
                                    const FrictionParams& fp) {
    return std::exp(log_predictive_likelihood(y, x_prev, regime, torque, dt, cfg, mp, fp));
}

/// log K = log p(y|M1) - log p(y|M2) + log prior_ratio. The normalization
/// constants cancel, so this is evaluated directly from the residuals:
/// subtracting the two log densities would lose differences below the
/// rounding granularity of the constant term.
inline double log_bayes_factor(double y, const State& x_prev, double torque, double dt,
                               const SelectorConfig& cfg, const MechParams& mp,
                               const FrictionParams& fp) {
    cfg.validate();
    const double r1 = y - predict_output(x_prev, Regime::NonSticking, torque, dt, mp, fp);
    const double r2 = y - predict_output(x_prev, Regime::Sticking, torque, dt, mp, fp);
    return (r2 - r1) * (r2 + r1) / (2.0 * cfg.r_var) + std::log(cfg.prior_ratio);
}

/// Bayes factor K > 0. Prefer log_bayes_factor for decisions; this form can
/// overflow for extreme residuals.
inline double bayes_factor(double y, const State& x_prev, double torque, double dt,
                           const SelectorConfig& cfg, const MechParams& mp,
                           const FrictionParams& fp) {
    return std::exp(log_bayes_factor(y, x_prev, torque, dt, cfg, mp, fp));
}

inline Regime select_from_log_k(double log_k, Regime current, const SelectorConfig& cfg) {
    // |K - 1| <= 1e-12 is a tie; compare in the log domain where it equals
    // |log K| <= 1e-12 to first order.
    if (std::abs(log_k) <= 1e-12) {
        switch (cfg.tie_policy) {
            case TiePolicy::PreferNonSticking: return Regime::NonSticking;
            case TiePolicy::PreferSticking: return Regime::Sticking;
            case TiePolicy::KeepCurrent: break;
        }
        return current;
    }
    return log_k > 0.0 ? Regime::NonSticking : Regime::Sticking;
}

/// Pick the model the current measurement supports: non-sticking for K > 1,
/// sticking for K < 1, tie policy otherwise.
inline Regime select(double y, const State& x_prev, double torque, double dt,
                     const SelectorConfig& cfg, Regime current, const MechParams& mp,
                     const FrictionParams& fp) {
    return select_from_log_k(log_bayes_factor(y, x_prev, torque, dt, cfg, mp, fp), current, cfg);
}

}  // namespace iwp
