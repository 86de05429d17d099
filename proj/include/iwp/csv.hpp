#pragma once

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iwp/errors.hpp"
#include "iwp/sim.hpp"

namespace iwp {
namespace csv {

/// Shortest representation that round-trips a double (>= 15 significant
/// digits where needed).
inline std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_double(const std::string& field, std::size_t row, const std::string& path) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE)
        throw InputError(path + ": row " + std::to_string(row) + ": bad number '" + field + "'");
    return v;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

/// Timestamps must increase with one fixed spacing; reports the first
/// offending row otherwise.
inline double check_uniform(const std::vector<double>& t, const std::string& path) {
    if (t.size() < 2) throw InputError(path + ": need at least two samples");
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw InputError(path + ": row 1: timestamps not increasing");
    for (std::size_t k = 2; k < t.size(); ++k) {
        if (std::abs((t[k] - t[k - 1]) - dt) > 1e-9)
            throw InputError(path + ": row " + std::to_string(k) + ": non-uniform sampling");
    }
    return dt;
}

}  // namespace csv

inline void write_trace_csv(const std::string& path, const RegimeTrace& trace) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "t,phi1,omega1,omega2,u,y,regime\n";
    for (const TraceRow& r : trace) {
        out << csv::format(r.t) << ',' << csv::format(r.x.phi1) << ','
            << csv::format(r.x.omega1) << ',' << csv::format(r.x.omega2) << ','
            << csv::format(r.u) << ',' << csv::format(r.y) << ',' << regime_tag(r.regime)
            << '\n';
    }
}

inline RegimeTrace read_trace_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || lines[0] != "t,phi1,omega1,omega2,u,y,regime")
        throw InputError(path + ": expected header t,phi1,omega1,omega2,u,y,regime");
    RegimeTrace trace;
    std::vector<double> ts;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto f = csv::split(lines[row]);
        if (f.size() != 7)
            throw InputError(path + ": row " + std::to_string(row) + ": expected 7 fields");
        TraceRow r;
        r.t = csv::parse_double(f[0], row, path);
        r.x.phi1 = csv::parse_double(f[1], row, path);
        r.x.omega1 = csv::parse_double(f[2], row, path);
        r.x.omega2 = csv::parse_double(f[3], row, path);
        r.u = csv::parse_double(f[4], row, path);
        r.y = csv::parse_double(f[5], row, path);
        const double tag = csv::parse_double(f[6], row, path);
        if (tag != 1.0 && tag != 2.0)
            throw InputError(path + ": row " + std::to_string(row) + ": regime must be 1 or 2");
        r.regime = tag == 1.0 ? Regime::NonSticking : Regime::Sticking;
        ts.push_back(r.t);
        trace.push_back(r);
    }
    csv::check_uniform(ts, path);
    return trace;
}

inline void write_measurements_csv(const std::string& path,
                                   const std::vector<Measurement>& samples) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "t,y,u\n";
    for (const Measurement& m : samples)
        out << csv::format(m.t) << ',' << csv::format(m.y) << ',' << csv::format(m.u) << '\n';
}

/// A measurement stream, optionally carrying reference velocity columns
/// (lab recordings include them; they feed metrics only, never observers).
struct MeasurementSeries {
    std::vector<Measurement> samples;
    double dt = 0.0;
    bool has_velocity_reference = false;
    std::vector<double> ref_omega1;
    std::vector<double> ref_omega2;
};

inline MeasurementSeries read_measurements_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw InputError(path + ": empty file");
    MeasurementSeries series;
    std::size_t fields = 3;
    if (lines[0] == "t,y,u") {
        fields = 3;
    } else if (lines[0] == "t,y,u,omega1,omega2") {
        fields = 5;
        series.has_velocity_reference = true;
    } else {
        throw InputError(path + ": expected header t,y,u or t,y,u,omega1,omega2");
    }
    if (lines.size() < 2) throw InputError(path + ": no samples");

    std::vector<double> ts;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto f = csv::split(lines[row]);
        if (f.size() != fields)
            throw InputError(path + ": row " + std::to_string(row) + ": expected " +
                             std::to_string(fields) + " fields");
        Measurement m;
        m.t = csv::parse_double(f[0], row, path);
        m.y = csv::parse_double(f[1], row, path);
        m.u = csv::parse_double(f[2], row, path);
        series.samples.push_back(m);
        ts.push_back(m.t);
        if (series.has_velocity_reference) {
            series.ref_omega1.push_back(csv::parse_double(f[3], row, path));
            series.ref_omega2.push_back(csv::parse_double(f[4], row, path));
        }
    }
    series.dt = csv::check_uniform(ts, path);
    return series;
}

}  // namespace iwp
