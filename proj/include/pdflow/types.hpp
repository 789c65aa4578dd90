#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace pdflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when operand sizes disagree (A vs b, x vs n, ...).
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a numerical routine produces or receives NaN/Inf.
class NonFiniteError : public std::runtime_error {
public:
    explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

inline void require_size(const Vector& v, Eigen::Index expected, const char* what) {
    if (v.size() != expected) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                             ", got " + std::to_string(v.size()));
    }
}

}  // namespace pdflow
