#pragma once

#include <stdexcept>
#include <string>

namespace iwp {

/// Malformed user input: config files, CSV schemas, out-of-range parameters.
/// CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure at runtime: non-finite states, covariance collapse,
/// observer divergence. CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structural defect in an observer design (e.g. unobservable pair).
struct DesignError : std::runtime_error {
    explicit DesignError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace iwp
