#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace credal {

/// Dense vector in R^d; also used for probability weights.
using numvec = std::vector<double>;
using indexvec = std::vector<std::size_t>;

// *******************************************************
// Error taxonomy
// *******************************************************

/// A value or structure violates a documented precondition.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Node or prefix addressing outside the valid range.
struct index_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// An exact enumeration would exceed the configured budget.
/// Enumeration never degrades to sampling; it fails instead.
struct budget_exceeded : std::runtime_error {
    double requested;
    double allowed;
    budget_exceeded(const std::string& what, double requested, double allowed)
        : std::runtime_error(what), requested(requested), allowed(allowed) {}
};

/// An iterative solver hit its iteration cap without reaching its
/// optimality certificate. Carries the final residual.
struct convergence_failure : std::runtime_error {
    double residual;
    convergence_failure(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
};

// *******************************************************
// Budgets
// *******************************************************

/// Limits on exact enumeration. `paths` bounds the product path space
/// (and vertex-sum combinations); `selections` bounds the adapted-measure
/// oracle used in tests and small scenarios.
struct budget {
    double paths = 1e7;
    double selections = 1e7;
};

// *******************************************************
// Small dense-vector helpers
// *******************************************************

inline double dot(const numvec& a, const numvec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); i++)
        s += a[i] * b[i];
    return s;
}

inline double squared_norm(const numvec& a) { return dot(a, a); }

inline double squared_distance(const numvec& a, const numvec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline bool all_finite(const numvec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace credal
