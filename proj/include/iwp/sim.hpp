#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "iwp/dynamics.hpp"
#include "iwp/errors.hpp"
#include "iwp/rk4.hpp"

namespace iwp {

/// Discrete-time noise injection: process noise added to the state after
/// each deterministic step, measurement noise added to the output only.
struct NoiseModel {
    Eigen::Vector3d q_diag = Eigen::Vector3d::Zero();  ///< process-noise variances
    double r_var = 0.0;                                ///< measurement variance

    void validate() const {
        if (q_diag.minCoeff() < 0.0 || r_var < 0.0)
            throw InputError("NoiseModel: variances must be >= 0");
    }
};

struct SimConfig {
    double dt = 0.005;     ///< step [s]
    double t_end = 30.0;   ///< duration [s]
    State x0;              ///< initial state
    double torque = 0.0;   ///< constant input torque, used when torque_samples is empty
    std::vector<double> torque_samples;  ///< zero-order-hold input per grid point
    std::optional<NoiseModel> noise;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(dt > 0.0)) throw InputError("SimConfig: dt must be > 0");
        if (!(t_end >= dt)) throw InputError("SimConfig: t_end must be >= dt");
        if (!x0.finite()) throw InputError("SimConfig: x0 must be finite");
        if (noise) noise->validate();
    }
};

/// One sample of a simulated run.
struct TraceRow {
    double t;
    State x;
    Regime regime;
    double u;  ///< input applied over [t, t+dt)
    double y;  ///< measured phi1 (noisy if configured)
};

using RegimeTrace = std::vector<TraceRow>;

/// Measurement sample as the observers see it.
struct Measurement {
    double t;
    double y;
    double u;
};

/// |omega2| below this counts as a zero crossing when testing for stiction
/// capture; finite steps rarely hit zero exactly.
inline constexpr double kZeroCrossingEps = 1e-4;

namespace detail {

inline double input_at(const SimConfig& cfg, std::size_t k) {
    if (cfg.torque_samples.empty()) return cfg.torque;
    return k < cfg.torque_samples.size() ? cfg.torque_samples[k] : cfg.torque_samples.back();
}

/// Entry test for the sticking regime: zero crossing of omega2 plus the
/// static-friction condition evaluated with omega2 projected to zero.
inline bool capture_to_stick(double omega2_prev, const State& post, double u_next,
                             const MechParams& mp, const FrictionParams& fp) {
    const bool crossed =
        (sgn(omega2_prev) != sgn(post.omega2)) || std::abs(post.omega2) < kZeroCrossingEps;
    return crossed && stiction_holds(post.phi1, post.omega1, u_next, mp, fp);
}

}  // namespace detail

/// Simulate the switched plant on a fixed grid. Friction passed as nullptr
/// disables both the Stribeck torque and the sticking regime (the trace is
/// then non-sticking throughout).
///
/// Regime changes take effect at grid points only: the wheel enters stiction
/// when its velocity crosses zero within a step and the friction condition
/// holds at the post-step state (omega2 is projected to exactly 0 on entry),
/// and leaves stiction as soon as the condition fails. Every row labeled
/// sticking satisfies the condition at that row's state and input.
inline RegimeTrace simulate(const SimConfig& cfg, const MechParams& mp,
                            const FrictionParams* friction) {
    cfg.validate();

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool noisy = cfg.noise.has_value();
    const Eigen::Vector3d w_sigma =
        noisy ? cfg.noise->q_diag.cwiseSqrt().eval() : Eigen::Vector3d::Zero().eval();
    const double v_sigma = noisy ? std::sqrt(cfg.noise->r_var) : 0.0;

    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));

    RegimeTrace trace;
    trace.reserve(n_steps + 1);

    State x = cfg.x0;
    Regime regime = Regime::NonSticking;
    if (friction && std::abs(x.omega2) < kZeroCrossingEps &&
        stiction_holds(x.phi1, x.omega1, detail::input_at(cfg, 0), mp, *friction)) {
        regime = Regime::Sticking;
        x.omega2 = 0.0;
    }

    auto measure = [&](const State& s) {
        return s.phi1 + (noisy ? v_sigma * gauss(rng) : 0.0);
    };
    trace.push_back({0.0, x, regime, detail::input_at(cfg, 0), measure(x)});

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double u = detail::input_at(cfg, k);
        const double omega2_prev = x.omega2;

        State next = rk4_step_pendulum(regime, x, u, mp, friction, cfg.dt,
                                       static_cast<long>(k));
        if (noisy) {
            next.phi1 += w_sigma[0] * gauss(rng);
            next.omega1 += w_sigma[1] * gauss(rng);
            // the wheel is pinned while sticking; noise acts on free states only
            const double w2_noise = w_sigma[2] * gauss(rng);
            if (regime == Regime::NonSticking) next.omega2 += w2_noise;
        }

        const double u_next = detail::input_at(cfg, k + 1);
        Regime next_regime = regime;
        if (friction) {
            if (regime == Regime::NonSticking) {
                if (detail::capture_to_stick(omega2_prev, next, u_next, mp, *friction)) {
                    next_regime = Regime::Sticking;
                    next.omega2 = 0.0;
                }
            } else if (!stiction_holds(next.phi1, next.omega1, u_next, mp, *friction)) {
                next_regime = Regime::NonSticking;
            }
        }

        x = next;
        regime = next_regime;
        trace.push_back({static_cast<double>(k + 1) * cfg.dt, x, regime, u_next, measure(x)});
    }
    return trace;
}

inline RegimeTrace simulate(const SimConfig& cfg, const MechParams& mp,
                            const FrictionParams& fp) {
    return simulate(cfg, mp, &fp);
}

/// Project a trace onto what a measurement stream contains.
inline std::vector<Measurement> emit_measurements(const RegimeTrace& trace) {
    std::vector<Measurement> out;
    out.reserve(trace.size());
    for (const TraceRow& row : trace) out.push_back({row.t, row.y, row.u});
    return out;
}

}  // namespace iwp
