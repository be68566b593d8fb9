#pragma once

#include <vector>

#include "credal/credal_core.hpp"

// Small scenarios reused across the test suite.
namespace fixtures {

using credal::marginal;
using credal::numvec;
using credal::sequence;

/// Two-point support {-1, +1} with generators (0.7, 0.3) and (0.3, 0.7):
/// upper mean 0.4, lower mean -0.4, second moment 1 under both.
inline marginal credal_coin() {
    return marginal({{-1.0}, {1.0}}, {{0.7, 0.3}, {0.3, 0.7}}, "credal coin");
}

/// Single generator (0.5, 0.5) on {-1, +1}: the classical fair coin.
inline marginal fair_coin() {
    return marginal({{-1.0}, {1.0}}, {{0.5, 0.5}}, "fair coin");
}

/// d=2 support at the triangle corners with one point mass per corner:
/// the mean set is the full triangle.
inline marginal corner_masses() {
    return marginal({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}},
                    {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}},
                    "corner masses");
}

inline sequence iid(const marginal& m, std::size_t n) {
    return sequence(std::vector<marginal>(n, m));
}

} // namespace fixtures
