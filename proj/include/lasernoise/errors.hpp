#pragma once

#include <stdexcept>
#include <string>

namespace lasernoise {

// Invalid parameters, malformed config files, inconsistent CLI flags.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver breakdowns: non-convergence, singular systems, NaN/Inf propagation.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// The linearization point is dynamically unstable: the drift matrix has an
// eigenvalue with positive real part that is not an identified gauge mode,
// so stationary spectra are undefined there.
struct UnstableDriftError : NumericalError {
    explicit UnstableDriftError(const std::string& msg) : NumericalError(msg) {}
};

// Filesystem problems (unreadable config, unwritable output).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lasernoise
