#pragma once

#include <stdexcept>
#include <string>

namespace faircurtail {

// Input text could not be parsed; message names the offending line.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a model requirement.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver failed to converge; carries the residual magnitude.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, double residual_)
        : std::runtime_error(msg), residual(residual_) {}
    double residual;
};

// Bad run configuration (flags, config file, weight lists, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace faircurtail
