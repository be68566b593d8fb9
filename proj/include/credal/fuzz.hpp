#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credal/inequality_lab.hpp"

namespace credal {

/**
 * Property campaign: samples random scenarios and checks every library
 * invariant against brute-force oracles. Identical config + seed yields
 * a byte-identical summary.
 */
struct fuzz_config {
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    // scenario size ranges (each sampled uniformly from 1..max)
    std::size_t d_max = 2;
    std::size_t n_max = 3;
    std::size_t m_max = 3;
    std::size_t k_max = 3;
    double support_half_width = 2.0; // support points on [-w, w]^d
    std::size_t directions = 100;    // sampled directions per marginal
    std::size_t plans = 20;          // random feasible plans per trial
    eval_options eval{};
    check_tolerances tol{};
};

struct check_counter {
    std::size_t performed = 0;
    std::size_t failed = 0;
};

struct fuzz_summary {
    std::size_t trials = 0;
    std::size_t failures = 0; // trials with any failed check or an exception

    check_counter oracle;        // product evaluator vs selection enumeration
    check_counter mass;          // selection path probabilities sum to 1
    check_counter sublinear;     // subadditivity, homogeneity, constants, monotonicity
    check_counter roundtrip;     // parse(serialize(seq)) == seq
    check_counter concentration; // squared-distance bound
    check_counter minimax;       // minimax equality + plan domination
    check_counter mean_sets;     // support match + generator-mean membership
    check_counter conditional;   // conditional test-family bound
    check_counter scalar;        // d=1 identity
    check_counter classical;     // all-K=1 degeneration
    check_counter additivity;    // Minkowski/support additivity
    check_counter projection;    // certificate + coefficient consistency

    std::size_t scalar_trials = 0;    // coverage: trials with d = 1
    std::size_t classical_trials = 0; // coverage: trials with every K = 1
    double worst_oracle_rel = 0.0;
    double worst_certificate = 0.0;

    std::vector<std::size_t> failed_trials;
    std::vector<std::string> counterexamples; // scenario (or error) document per failed trial
    std::vector<std::string> failure_notes;   // what went wrong, parallel to failed_trials
};

struct fuzz_outcome {
    fuzz_summary stats;
    std::string summary_json;
};

/// Runs the campaign. Failures are data (recorded in the summary), not
/// exceptions; per-trial exceptions are caught and counted.
fuzz_outcome fuzz(const fuzz_config& cfg);

/// The campaign's scenario sampler, exposed so tests can pin its
/// distribution: dimensions and sizes uniform on 1..max, support points
/// uniform on the cube (pairwise distinct), generators uniform on the
/// probability simplex.
sequence sample_sequence(std::uint64_t trial_seed, const fuzz_config& cfg);

} // namespace credal
