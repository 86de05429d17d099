#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <variant>
#include <vector>

#include "iwp/config.hpp"
#include "iwp/csv.hpp"
#include "iwp/ekf.hpp"
#include "iwp/nol.hpp"
#include "iwp/nop.hpp"
#include "iwp/selection.hpp"

namespace iwp {

struct ReportRow {
    double t;
    double y;
    double u;
    State x_hat;
    Regime regime;  ///< model selected for the step ending at t
    double log_k;   ///< log Bayes factor behind that selection
};

/// Run summary. RMSE fields are only meaningful when a reference was given;
/// settling and regime agreement additionally need a full reference trace.
struct ReportSummary {
    std::size_t samples = 0;
    bool has_reference = false;
    bool has_regime_reference = false;
    double rmse_phi1 = 0.0, rmse_omega1 = 0.0, rmse_omega2 = 0.0;
    double tail_rmse_phi1 = 0.0, tail_rmse_omega1 = 0.0, tail_rmse_omega2 = 0.0;
    double tail_seconds = 0.0;
    std::optional<double> settling_time;  ///< |phi1 error| < 0.02 rad from here on
    double regime_agreement = 0.0;        ///< fraction, switch neighborhoods excluded
};

struct EstimationReport {
    std::vector<ReportRow> rows;
    ReportSummary summary;
};

/// Reference states to score an estimate against.
struct Reference {
    std::vector<State> states;
    std::vector<Regime> regimes;  ///< empty when only velocity columns exist
    bool has_phi1 = false;

    static Reference from_trace(const RegimeTrace& trace) {
        Reference ref;
        ref.has_phi1 = true;
        for (const TraceRow& r : trace) {
            ref.states.push_back(r.x);
            ref.regimes.push_back(r.regime);
        }
        return ref;
    }

    static Reference from_velocity_columns(const MeasurementSeries& series) {
        Reference ref;
        for (std::size_t k = 0; k < series.samples.size(); ++k)
            ref.states.push_back({0.0, series.ref_omega1[k], series.ref_omega2[k]});
        return ref;
    }
};

/// One estimator behind the uniform per-sample interface.
class AnyObserver {
  public:
    static AnyObserver make(const ExperimentConfig& cfg, double dt) {
        switch (cfg.observer_type) {
            case ObserverType::Ekf:
                return AnyObserver(PendulumEkf(cfg.mech, cfg.friction, cfg.observer_x0,
                                               cfg.p0_diag.asDiagonal(), cfg.q_diag.asDiagonal(),
                                               cfg.r_var, cfg.wheel_on_stick));
            case ObserverType::Nol: {
                const NolDesign design =
                    cfg.nol_deadbeat
                        ? nol_design(cfg.mech, cfg.nol_mode, dt)
                        : nol_design(cfg.mech, cfg.nol_mode, dt, cfg.nol_poles,
                                     cfg.nol_poles_stick);
                return AnyObserver(NolObserver(design, cfg.mech, cfg.friction, cfg.observer_x0,
                                               cfg.friction_injection, cfg.wheel_on_stick));
            }
            case ObserverType::Nop:
            default:
                return AnyObserver(NopObserver(NopDesign(cfg.alpha, cfg.beta), cfg.mech,
                                               cfg.friction, cfg.observer_x0,
                                               cfg.friction_injection, cfg.wheel_on_stick));
        }
    }

    State step(Regime regime, double torque, double y, double dt) {
        return std::visit([&](auto& obs) { return obs.step(regime, torque, y, dt); }, impl_);
    }

    State estimate() const {
        return std::visit([](const auto& obs) -> State { return obs.estimate(); }, impl_);
    }

  private:
    template <class T>
    explicit AnyObserver(T obs) : impl_(std::move(obs)) {}

    std::variant<PendulumEkf, NolObserver, NopObserver> impl_;
};

namespace detail {

inline Regime initial_regime(const State& x0, double u0, const ExperimentConfig& cfg) {
    if (cfg.friction_enabled && std::abs(x0.omega2) < kZeroCrossingEps &&
        stiction_holds(x0.phi1, x0.omega1, u0, cfg.mech, cfg.friction))
        return Regime::Sticking;
    return Regime::NonSticking;
}

inline void fill_metrics(EstimationReport& report, const Reference& ref, double dt) {
    const std::size_t n = report.rows.size();
    ReportSummary& s = report.summary;
    s.has_reference = true;
    s.has_regime_reference = !ref.regimes.empty();

    const double span = report.rows.back().t - report.rows.front().t;
    s.tail_seconds = std::min(10.0, span);
    const double tail_start = report.rows.back().t - s.tail_seconds;

    double se[3] = {0, 0, 0}, tail_se[3] = {0, 0, 0};
    std::size_t tail_n = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector3d err = report.rows[k].x_hat.vec() - ref.states[k].vec();
        for (int i = 0; i < 3; ++i) se[i] += err[i] * err[i];
        if (report.rows[k].t >= tail_start - 1e-12) {
            for (int i = 0; i < 3; ++i) tail_se[i] += err[i] * err[i];
            ++tail_n;
        }
    }
    s.rmse_phi1 = ref.has_phi1 ? std::sqrt(se[0] / n) : 0.0;
    s.rmse_omega1 = std::sqrt(se[1] / n);
    s.rmse_omega2 = std::sqrt(se[2] / n);
    s.tail_rmse_phi1 = ref.has_phi1 && tail_n ? std::sqrt(tail_se[0] / tail_n) : 0.0;
    s.tail_rmse_omega1 = tail_n ? std::sqrt(tail_se[1] / tail_n) : 0.0;
    s.tail_rmse_omega2 = tail_n ? std::sqrt(tail_se[2] / tail_n) : 0.0;

    if (ref.has_phi1) {
        // first time after which the angle error stays inside 0.02 rad
        std::size_t last_bad = n;
        for (std::size_t k = n; k-- > 0;) {
            if (std::abs(report.rows[k].x_hat.phi1 - ref.states[k].phi1) >= 0.02) {
                last_bad = k;
                break;
            }
        }
        if (last_bad == n) {
            s.settling_time = report.rows.front().t;
        } else if (last_bad + 1 < n) {
            s.settling_time = report.rows[last_bad + 1].t;
        }  // never settles otherwise
    }

    if (s.has_regime_reference) {
        // the model selected at sample k explains the step [t_{k-1}, t_k),
        // governed by the reference regime at row k-1
        std::vector<Regime> truth(n);
        for (std::size_t k = 1; k < n; ++k) truth[k] = ref.regimes[k - 1];
        std::vector<bool> excluded(n, false);
        for (std::size_t k = 2; k < n; ++k) {
            if (truth[k] != truth[k - 1]) {
                const std::size_t lo = k >= 2 ? k - 2 : 0;
                const std::size_t hi = std::min(n - 1, k + 2);
                for (std::size_t j = lo; j <= hi; ++j) excluded[j] = true;
            }
        }
        std::size_t agree = 0, counted = 0;
        for (std::size_t k = 1; k < n; ++k) {
            if (excluded[k]) continue;
            ++counted;
            if (report.rows[k].regime == truth[k]) ++agree;
        }
        s.regime_agreement = counted ? static_cast<double>(agree) / counted : 1.0;
    }
    (void)dt;
}

}  // namespace detail

/// Run the selector-driven estimation over a measurement stream: at every
/// sample both one-step predictions are scored against the measurement, the
/// winning model is selected, and the observer advances under it.
inline EstimationReport run_estimation(const ExperimentConfig& cfg,
                                       const MeasurementSeries& series,
                                       const Reference* reference = nullptr) {
    if (series.samples.size() < 2) throw InputError("measurement stream too short");
    if (reference && reference->states.size() != series.samples.size())
        throw InputError("reference length does not match measurement stream");

    const double dt = series.dt;
    AnyObserver observer = AnyObserver::make(cfg, dt);

    EstimationReport report;
    report.rows.reserve(series.samples.size());

    Regime current = detail::initial_regime(cfg.observer_x0, series.samples[0].u, cfg);
    report.rows.push_back({series.samples[0].t, series.samples[0].y, series.samples[0].u,
                           cfg.observer_x0, current, 0.0});

    for (std::size_t k = 1; k < series.samples.size(); ++k) {
        const Measurement& m = series.samples[k];
        const double u_held = series.samples[k - 1].u;
        const State x_prev = observer.estimate();

        double log_k = 0.0;
        if (cfg.friction_enabled) {
            log_k = log_bayes_factor(m.y, x_prev, u_held, dt, cfg.selector, cfg.mech,
                                     cfg.friction);
            current = select_from_log_k(log_k, current, cfg.selector);
        }
        const State x_hat = observer.step(current, u_held, m.y, dt);
        report.rows.push_back({m.t, m.y, m.u, x_hat, current, log_k});
    }

    report.summary.samples = report.rows.size();
    if (reference) detail::fill_metrics(report, *reference, dt);
    return report;
}

inline void write_report_csv(const std::string& path, const EstimationReport& report) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "t,y,u,phi1_hat,omega1_hat,omega2_hat,regime,log_k\n";
    for (const ReportRow& r : report.rows) {
        out << csv::format(r.t) << ',' << csv::format(r.y) << ',' << csv::format(r.u) << ','
            << csv::format(r.x_hat.phi1) << ',' << csv::format(r.x_hat.omega1) << ','
            << csv::format(r.x_hat.omega2) << ',' << regime_tag(r.regime) << ','
            << csv::format(r.log_k) << '\n';
    }
}

inline void write_summary(const std::string& path, const ReportSummary& s) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "samples = " << s.samples << '\n';
    if (s.has_reference) {
        out << "rmse_phi1 = " << csv::format(s.rmse_phi1) << '\n';
        out << "rmse_omega1 = " << csv::format(s.rmse_omega1) << '\n';
        out << "rmse_omega2 = " << csv::format(s.rmse_omega2) << '\n';
        out << "tail_seconds = " << csv::format(s.tail_seconds) << '\n';
        out << "tail_rmse_phi1 = " << csv::format(s.tail_rmse_phi1) << '\n';
        out << "tail_rmse_omega1 = " << csv::format(s.tail_rmse_omega1) << '\n';
        out << "tail_rmse_omega2 = " << csv::format(s.tail_rmse_omega2) << '\n';
        out << "settling_time = "
            << (s.settling_time ? csv::format(*s.settling_time) : std::string("never")) << '\n';
        if (s.has_regime_reference)
            out << "regime_agreement = " << csv::format(s.regime_agreement) << '\n';
    }
}

}  // namespace iwp
