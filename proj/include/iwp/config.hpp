#pragma once

#include <Eigen/Core>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iwp/errors.hpp"
#include "iwp/nol.hpp"
#include "iwp/observer.hpp"
#include "iwp/params.hpp"
#include "iwp/selection.hpp"
#include "iwp/sim.hpp"

namespace iwp {

enum class ObserverType { Ekf, Nol, Nop };

/// Everything a run needs, read from a flat `section.key = value` file.
/// Defaults are the identified rig parameters and the published observer
/// settings; unknown keys are rejected.
struct ExperimentConfig {
    MechParams mech = MechParams::lab();
    FrictionParams friction = FrictionParams::lab();
    bool friction_enabled = true;

    SimConfig sim;

    ObserverType observer_type = ObserverType::Ekf;
    State observer_x0{-M_PI / 10.0, 1.0, 1.0};
    Eigen::Vector3d p0_diag{0.00165, 0.01, 0.1};
    Eigen::Vector3d q_diag{0.0, 0.01, 0.1};
    double r_var = 0.001;
    NolMode nol_mode = NolMode::QuasiContinuous;
    bool nol_deadbeat = false;
    Eigen::Vector3d nol_poles{-2.0, -3.0, -0.5};
    Eigen::Vector2d nol_poles_stick{-2.0, -3.0};
    double alpha = 10.0;
    double beta = 5.0;
    bool friction_injection = true;
    WheelStickPolicy wheel_on_stick = WheelStickPolicy::Hold;

    SelectorConfig selector;

    std::string reference_path;  ///< optional trace CSV for metrics

    void validate() const {
        sim.validate();
        selector.validate();
        if (!observer_x0.finite()) throw InputError("observer.x0 must be finite");
        if (p0_diag.minCoeff() < 0.0 || q_diag.minCoeff() < 0.0)
            throw InputError("observer covariance diagonals must be >= 0");
        if (!(r_var > 0.0)) throw InputError("observer.r must be > 0");
        if (!(alpha > 0.0) || !(beta > 0.0))
            throw InputError("observer.alpha and observer.beta must be > 0");
    }
};

namespace detail {

class KeyValueFile {
  public:
    explicit KeyValueFile(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open config " + path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty() || value.empty())
                throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
            values_[key] = value;
        }
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return parse_number(key, it->second);
    }

    bool boolean(const std::string& key, bool fallback) {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "on" || it->second == "1") return true;
        if (it->second == "false" || it->second == "off" || it->second == "0") return false;
        throw InputError("config key " + key + ": expected true/false, got '" + it->second + "'");
    }

    std::vector<double> numbers(const std::string& key, std::size_t n,
                                const std::vector<double>& fallback) {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::istringstream ss(it->second);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(parse_number(key, trim(field)));
        if (out.size() != n)
            throw InputError("config key " + key + ": expected " + std::to_string(n) +
                             " comma-separated values");
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : values_) {
            if (!used_.count(key)) throw InputError("unknown config key: " + key);
        }
    }

  private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t");
        return s.substr(a, b - a + 1);
    }

    static double parse_number(const std::string& key, const std::string& value) {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0' || errno == ERANGE)
            throw InputError("config key " + key + ": bad number '" + value + "'");
        return v;
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

}  // namespace detail

inline ExperimentConfig load_config(const std::string& path) {
    detail::KeyValueFile kv(path);
    ExperimentConfig cfg;

    cfg.mech = MechParams(kv.number("params.a", 0.15535), kv.number("params.theta1", 0.05045),
                          kv.number("params.theta2", 0.00113), kv.number("params.d1", 0.00885),
                          kv.number("params.d2", 0.00015));
    cfg.friction =
        FrictionParams(kv.number("params.r_c", 0.0024), kv.number("params.r_s", 0.0026),
                       kv.number("params.omega20", 0.0501));
    cfg.friction_enabled = kv.boolean("sim.friction", true);

    cfg.sim.dt = kv.number("sim.dt", 0.005);
    cfg.sim.t_end = kv.number("sim.t_end", 30.0);
    const auto x0 = kv.numbers("sim.x0", 3, {0.01, 0.0, 0.0});
    cfg.sim.x0 = {x0[0], x0[1], x0[2]};
    cfg.sim.torque = kv.number("sim.torque", 0.0);
    const auto q = kv.numbers("sim.process_noise", 3, {0.0, 0.0, 0.0});
    const double r = kv.number("sim.measurement_noise", 0.0);
    if (q[0] != 0.0 || q[1] != 0.0 || q[2] != 0.0 || r != 0.0)
        cfg.sim.noise = NoiseModel{{q[0], q[1], q[2]}, r};
    cfg.sim.seed = static_cast<std::uint64_t>(kv.number("sim.seed", 1.0));

    const std::string type = kv.str("observer.type", "ekf");
    if (type == "ekf") cfg.observer_type = ObserverType::Ekf;
    else if (type == "nol") cfg.observer_type = ObserverType::Nol;
    else if (type == "nop") cfg.observer_type = ObserverType::Nop;
    else throw InputError("observer.type must be ekf, nol or nop");

    const auto ox0 = kv.numbers("observer.x0", 3, {-M_PI / 10.0, 1.0, 1.0});
    cfg.observer_x0 = {ox0[0], ox0[1], ox0[2]};
    const auto p0 = kv.numbers("observer.p0", 3, {0.00165, 0.01, 0.1});
    cfg.p0_diag = {p0[0], p0[1], p0[2]};
    const auto oq = kv.numbers("observer.q", 3, {0.0, 0.01, 0.1});
    cfg.q_diag = {oq[0], oq[1], oq[2]};
    cfg.r_var = kv.number("observer.r", 0.001);

    const std::string mode = kv.str("observer.nol_mode", "continuous");
    if (mode == "continuous") cfg.nol_mode = NolMode::QuasiContinuous;
    else if (mode == "sampled") cfg.nol_mode = NolMode::SampledData;
    else throw InputError("observer.nol_mode must be continuous or sampled");
    const std::string gain = kv.str("observer.nol_gain", mode == "sampled" ? "deadbeat" : "poles");
    if (gain == "deadbeat") cfg.nol_deadbeat = true;
    else if (gain == "poles") cfg.nol_deadbeat = false;
    else throw InputError("observer.nol_gain must be deadbeat or poles");
    if (cfg.nol_deadbeat && cfg.nol_mode == NolMode::QuasiContinuous)
        throw InputError("observer.nol_gain = deadbeat requires observer.nol_mode = sampled");
    const auto poles = kv.numbers("observer.nol_poles", 3, {-2.0, -3.0, -0.5});
    cfg.nol_poles = {poles[0], poles[1], poles[2]};
    const auto poles2 = kv.numbers("observer.nol_poles_stick", 2, {-2.0, -3.0});
    cfg.nol_poles_stick = {poles2[0], poles2[1]};

    cfg.alpha = kv.number("observer.alpha", 10.0);
    cfg.beta = kv.number("observer.beta", 5.0);
    cfg.friction_injection = kv.boolean("observer.friction_injection", true);
    const std::string wheel = kv.str("observer.wheel_on_stick", "hold");
    if (wheel == "hold") cfg.wheel_on_stick = WheelStickPolicy::Hold;
    else if (wheel == "zero") cfg.wheel_on_stick = WheelStickPolicy::Zero;
    else throw InputError("observer.wheel_on_stick must be hold or zero");

    cfg.selector.r_var = kv.number("selector.r", 0.001);
    cfg.selector.prior_ratio = kv.number("selector.prior_ratio", 1.0);
    const std::string tie = kv.str("selector.tie", "keep");
    if (tie == "keep") cfg.selector.tie_policy = TiePolicy::KeepCurrent;
    else if (tie == "nonsticking") cfg.selector.tie_policy = TiePolicy::PreferNonSticking;
    else if (tie == "sticking") cfg.selector.tie_policy = TiePolicy::PreferSticking;
    else throw InputError("selector.tie must be keep, nonsticking or sticking");

    cfg.reference_path = kv.str("io.reference", "");

    kv.reject_unknown();
    cfg.validate();
    return cfg;
}

}  // namespace iwp
