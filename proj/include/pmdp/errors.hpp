#pragma once

#include <stdexcept>
#include <string>

namespace pmdp {

/// Invalid dimensions, malformed configuration, or broken input invariants.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Divergence evaluated outside its domain (zero reference mass without a floor).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Solver failure. Carries the last constraint value so callers can tell an
/// infeasible problem from a dual step size that is too small.
struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double last_constraint_value, int iterations)
        : std::runtime_error(what), last_g(last_constraint_value), iters(iterations) {}
    double last_g;
    int iters;
};

} // namespace pmdp
