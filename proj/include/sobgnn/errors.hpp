#pragma once

#include <stdexcept>
#include <string>

namespace sobgnn {

/// Incompatible matrix/vector shapes.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Invalid argument value (k >= N, rho = 0, bad fractions, ...).
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Input violates a mathematical precondition (negative weights, asymmetry, ...).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Malformed or inconsistent input data (parse failures, mismatched sizes).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical breakdown at runtime (non-finite values, degenerate cascade).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sobgnn
