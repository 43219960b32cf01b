#pragma once

#include <stdexcept>
#include <string>

namespace cma {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IterationLimitError : SolveError {
    double residual;
    IterationLimitError(const std::string& what, double res)
        : SolveError(what + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BarrierError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cma
