#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace torsolve {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid shape data or a mesh/collocation request that cannot be met.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Bad run configuration (missing keys, out-of-range values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Singular or ill-conditioned linear systems, invalid material states.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Newton iteration failed; carries the residual history (max-norm, scaled by sigma_Y).
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace torsolve
