// Command-line front end: synthetic experiments, observer runs over
// measurement streams, and side-by-side observer comparison.
//
// Exit codes: 0 ok, 2 malformed input, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "iwp/config.hpp"
#include "iwp/csv.hpp"
#include "iwp/runner.hpp"
#include "iwp/sim.hpp"

namespace {

namespace fs = std::filesystem;
using namespace iwp;

std::string observer_name(ObserverType type) {
    switch (type) {
        case ObserverType::Ekf: return "ekf";
        case ObserverType::Nol: return "nol";
        case ObserverType::Nop: return "nop";
    }
    return "ekf";
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string());
    return dir;
}

std::optional<Reference> load_reference(const ExperimentConfig& cfg,
                                        const MeasurementSeries& series) {
    if (!cfg.reference_path.empty())
        return Reference::from_trace(read_trace_csv(cfg.reference_path));
    if (series.has_velocity_reference) return Reference::from_velocity_columns(series);
    return std::nullopt;
}

void print_summary(const std::string& name, const ReportSummary& s) {
    std::printf("%s: %zu samples", name.c_str(), s.samples);
    if (s.has_reference) {
        std::printf(", rmse(omega2)=%.4g", s.rmse_omega2);
        if (s.settling_time)
            std::printf(", settled at t=%.3g s", *s.settling_time);
        else
            std::printf(", not settled");
        if (s.has_regime_reference) std::printf(", regime agreement %.1f%%",
                                                100.0 * s.regime_agreement);
    }
    std::printf("\n");
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 std::optional<std::uint64_t> seed) {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.sim.seed = *seed;
    const fs::path dir = ensure_out_dir(out);

    const RegimeTrace trace =
        simulate(cfg.sim, cfg.mech, cfg.friction_enabled ? &cfg.friction : nullptr);
    write_trace_csv((dir / "trace.csv").string(), trace);
    write_measurements_csv((dir / "measurements.csv").string(), emit_measurements(trace));
    std::printf("wrote %s and %s (%zu samples)\n", (dir / "trace.csv").c_str(),
                (dir / "measurements.csv").c_str(), trace.size());
    return 0;
}

int cmd_estimate(const std::string& config_path, const std::string& measurements,
                 const std::string& out) {
    const ExperimentConfig cfg = load_config(config_path);
    const MeasurementSeries series = read_measurements_csv(measurements);
    const std::optional<Reference> ref = load_reference(cfg, series);

    const EstimationReport report =
        run_estimation(cfg, series, ref ? &*ref : nullptr);

    const fs::path dir = ensure_out_dir(out);
    const std::string name = observer_name(cfg.observer_type);
    write_report_csv((dir / ("estimate_" + name + ".csv")).string(), report);
    write_summary((dir / ("summary_" + name + ".txt")).string(), report.summary);
    print_summary(name, report.summary);
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& measurements,
                const std::string& out) {
    const ExperimentConfig base = load_config(config_path);
    const MeasurementSeries series = read_measurements_csv(measurements);
    const std::optional<Reference> ref = load_reference(base, series);
    const fs::path dir = ensure_out_dir(out);

    std::vector<std::optional<EstimationReport>> reports(3);
    const ObserverType types[3] = {ObserverType::Ekf, ObserverType::Nol, ObserverType::Nop};
    bool any_failed = false;
    for (int i = 0; i < 3; ++i) {
        ExperimentConfig cfg = base;
        cfg.observer_type = types[i];
        const std::string name = observer_name(types[i]);
        try {
            reports[i] = run_estimation(cfg, series, ref ? &*ref : nullptr);
            write_report_csv((dir / ("estimate_" + name + ".csv")).string(), *reports[i]);
            write_summary((dir / ("summary_" + name + ".txt")).string(), reports[i]->summary);
            print_summary(name, reports[i]->summary);
        } catch (const std::exception& e) {
            any_failed = true;
            std::fprintf(stderr, "%s failed: %s\n", name.c_str(), e.what());
        }
    }

    // combined regime timeline (the data behind the shaded model bands)
    std::ofstream regimes((dir / "regimes.csv").string());
    if (!regimes) throw InputError("cannot write regimes.csv");
    regimes << "t,regime_ekf,regime_nol,regime_nop";
    const bool with_truth = ref && !ref->regimes.empty();
    if (with_truth) regimes << ",regime_true";
    regimes << "\n";
    for (std::size_t k = 0; k < series.samples.size(); ++k) {
        regimes << csv::format(series.samples[k].t);
        for (int i = 0; i < 3; ++i) {
            regimes << ',';
            if (reports[i]) regimes << regime_tag(reports[i]->rows[k].regime);
        }
        if (with_truth) regimes << ',' << regime_tag(ref->regimes[k]);
        regimes << "\n";
    }
    return any_failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"switched inertia wheel pendulum: simulation and state estimation"};
    app.require_subcommand(1);

    std::string config_path, measurements, out;
    std::optional<std::uint64_t> seed;

    CLI::App* sim = app.add_subcommand("simulate", "run the synthetic experiment");
    sim->add_option("--config", config_path, "experiment config file")->required();
    sim->add_option("--out", out, "output directory (default .)");
    sim->add_option("--seed", seed, "override sim.seed");

    CLI::App* est = app.add_subcommand("estimate", "run the configured observer over a stream");
    est->add_option("--config", config_path, "experiment config file")->required();
    est->add_option("--measurements", measurements, "measurement CSV (t,y,u)")->required();
    est->add_option("--out", out, "output directory (default .)");

    CLI::App* cmp = app.add_subcommand("compare", "run all three observers over a stream");
    cmp->add_option("--config", config_path, "experiment config file")->required();
    cmp->add_option("--measurements", measurements, "measurement CSV (t,y,u)")->required();
    cmp->add_option("--out", out, "output directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out, seed);
        if (est->parsed()) return cmd_estimate(config_path, measurements, out);
        if (cmp->parsed()) return cmd_compare(config_path, measurements, out);
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const DesignError& e) {
        std::fprintf(stderr, "design failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
