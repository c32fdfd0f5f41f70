#pragma once

#include <stdexcept>
#include <string>

namespace rstar {

// Typed failures so callers (and the CLI exit-code mapping) can tell a bad
// input apart from a fit that never converged or a diagnostic that tripped.

struct invalid_parameter_error : std::runtime_error {
    explicit invalid_parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Base for optimizer failures.
struct fit_error : std::runtime_error {
    explicit fit_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Ran out of iterations without meeting the gradient tolerance.
struct convergence_error : fit_error {
    explicit convergence_error(const std::string& msg) : fit_error(msg) {}
};

// The likelihood has no finite maximizer (separation, sigma -> 0, escaping iterates).
struct divergence_error : fit_error {
    explicit divergence_error(const std::string& msg) : fit_error(msg) {}
};

/// Base for numerical diagnostics that tripped after fitting.
struct diagnostic_error : std::runtime_error {
    explicit diagnostic_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct conditioning_error : diagnostic_error {
    explicit conditioning_error(const std::string& msg) : diagnostic_error(msg) {}
};

// Profile curvature -zeta2 came out non-positive at a claimed maximum.
struct curvature_error : diagnostic_error {
    explicit curvature_error(const std::string& msg) : diagnostic_error(msg) {}
};

// A constrained fit beat the global fit, or the grid center is not the maximum.
struct profile_inconsistency_error : diagnostic_error {
    explicit profile_inconsistency_error(const std::string& msg) : diagnostic_error(msg) {}
};

// q and r disagree in sign away from the origin; signals a broken fit upstream.
struct sign_inconsistency_error : diagnostic_error {
    explicit sign_inconsistency_error(const std::string& msg) : diagnostic_error(msg) {}
};

struct bracket_error : diagnostic_error {
    explicit bracket_error(const std::string& msg) : diagnostic_error(msg) {}
};

}  // namespace rstar
