#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credal/convex_geom.hpp"
#include "credal/credal_core.hpp"

namespace credal {

/**
 * Derived objects of a credal sequence and the concentration checks on
 * them: per-coordinate mean sets, their Minkowski average, the variance
 * proxy, and the distance-of-sample-mean functionals certified by
 * `certify`.
 */

/// Convex hull of the generator means: the set of means E_P[X] as P
/// ranges over the credal set.
polytope mean_set(const marginal& m);

/// Support function of the mean set evaluated through the expectation
/// route: upper expectation of the linear function <p, x>. Agrees with
/// support_value(mean_set(m), p) to within roundoff.
double mean_support(const marginal& m, const numvec& direction);

/**
 * Result of the inner minimizations
 *     inf over theta in mean set of  max_k (E_k|X|^2 - 2<theta, m_k> + |theta|^2)
 * one per coordinate, and their maximum (the variance proxy).
 */
struct variance_proxy_result {
    numvec per_index;               // one infimum per coordinate, each >= 0
    double value = 0.0;             // max of per_index
    std::vector<numvec> minimizers; // attaining theta per coordinate, inside the mean set
    std::size_t iterations = 0;     // worst per-coordinate iteration count
    double residual = 0.0;          // worst duality gap at exit
};

/**
 * Computes the variance proxy by conditional-gradient ascent on the
 * concave dual max over simplex weights mu of <c, mu> - |M mu|^2, where
 * c holds generator second moments and M generator means. Primal and
 * dual values sandwich the infimum; iteration stops when their gap falls
 * below 1e-12 relative.
 *
 * Throws convergence_failure (with the residual gap) if the sandwich
 * does not close within the iteration cap.
 */
variance_proxy_result variance_proxy(const sequence& seq);

/// Upper expectation of the squared distance from the sample mean to the
/// Minkowski average of the mean sets.
double mean_distance_sq(const sequence& seq, const eval_options& opts = {});

/**
 * Infimum over mean-set-valued plans xi of the upper expectation of
 * |sample mean - xi|^2, attained by the pointwise projection of the
 * sample mean (exact on a finite path space). Equals mean_distance_sq
 * up to roundoff.
 */
double minimax_distance_sq(const sequence& seq, const eval_options& opts = {});

/**
 * d=1 specialization: upper expectation of the squared one-sided
 * deviation ((s - hi)^+ + (s - lo)^-)^2 of the sample mean s, where
 * [lo, hi] is built from the upper expectations of -X_i and X_i.
 * Identical to mean_distance_sq for scalar sequences.
 *
 * Throws invalid_input when the sequence dimension is not 1.
 */
double scalar_deviation_sq(const sequence& seq, const eval_options& opts = {});

struct check_tolerances {
    double identity = 1e-12;         // support-function match, scalar identity
    double membership = 1e-9;        // distance-to-polytope membership
    double inequality_slack = 1e-8;  // one-sided relative slack on inequalities
    double minimax = 1e-9;           // |minimax - mean distance| tolerance
    double conditional = 1e-12;      // conditional-bound excess tolerance
    double classical = 1e-10;        // K=1 degeneration tolerance
    double oracle_rel = 1e-10;       // relative tolerance vs enumeration oracles
};

struct check_options {
    eval_options eval{};
    check_tolerances tol{};
    std::uint64_t seed = 0;        // seeds the direction/test-point sampling
    std::size_t directions = 100;  // sampled directions per marginal
};

/**
 * Everything `certify` computed, plus pass flags. The flags are pure
 * functions of the recorded numbers and tolerances; apply_flags
 * recomputes them from the rest of the struct.
 */
struct check_report {
    std::string scenario;
    std::size_t dimension = 0;
    std::size_t n = 0;

    std::vector<std::vector<numvec>> marginal_mean_vertices; // one vertex list per coordinate
    std::vector<numvec> mean_vertices;                       // Minkowski average vertices

    numvec variance_per_index;
    double variance_proxy = 0.0;
    double bound = 0.0; // variance_proxy / n

    double mean_distance = 0.0;    // upper expectation of squared distance
    double minimax_distance = 0.0; // infimum form of the same quantity
    double scalar_deviation = 0.0; // d=1 only
    bool scalar_applicable = false;

    // worst-case measured errors backing the flags
    double support_mismatch = 0.0;   // |mean_support - polytope support|
    double membership_excess = 0.0;  // generator-mean distance to its mean set
    double conditional_excess = 0.0; // test-family conditional mean above the marginal bound
    double minimax_gap = 0.0;        // |minimax_distance - mean_distance|
    double scalar_gap = 0.0;         // |scalar_deviation - mean_distance|

    check_tolerances tolerances{};
    std::uint64_t seed = 0;
    std::size_t directions = 0;
    std::string rng_algorithm;

    // pass flags, see apply_flags for their definitions
    bool concentration_ok = false;
    bool minimax_ok = false;
    bool mean_set_ok = false;
    bool conditional_ok = false;
    bool scalar_ok = false;

    bool all_ok() const {
        return concentration_ok && minimax_ok && mean_set_ok && conditional_ok &&
               scalar_ok;
    }
};

/// Recomputes the pass flags from the numbers and tolerances already in
/// the report; certify calls this, and a deserialized report can be
/// re-flagged to audit self-consistency.
void apply_flags(check_report& r);

/**
 * Runs every check on the sequence:
 *   - the sample-mean concentration inequality against the variance
 *     proxy bound,
 *   - the minimax form of the same quantity,
 *   - mean-set consistency (support match on sampled directions,
 *     generator means inside the mean set),
 *   - conditional means of the sampled test family never exceeding the
 *     marginal upper expectation,
 *   - the d=1 scalar identity.
 *
 * Budget and convergence problems propagate as exceptions; a failed
 * check is a report outcome, not an error.
 */
check_report certify(const sequence& seq, const check_options& opts = {});

} // namespace credal
