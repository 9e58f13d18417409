#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dicke {

/// Iterative solver hit its cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Non-positive curvature of the crystal potential.
class InstabilityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No fidelity maximum found inside the search window.
class SearchError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Data cannot constrain the requested parameters.
class IdentifiabilityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input data. `line` is 1-based, 0 when unknown.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace dicke
