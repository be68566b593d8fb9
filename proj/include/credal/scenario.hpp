#pragma once

#include <cstddef>
#include <string>

#include "credal/credal_core.hpp"
#include "credal/inequality_lab.hpp"

namespace credal {

/**
 * Scenario ingestion and report emission. Scenarios are versioned JSON
 * documents:
 *
 *   {
 *     "version": 1,
 *     "dimension": 1,
 *     "marginals": [
 *       {
 *         "label": "coin",               // optional
 *         "support": [[-1.0], [1.0]],    // m points of d numbers each
 *         "generators": [[0.7, 0.3],     // K probability vectors of length m
 *                        [0.3, 0.7]]
 *       }
 *     ],
 *     "iid": 2,                          // optional: replicate the single marginal
 *     "budget": {"paths": 1e7, "selections": 1e7},      // optional
 *     "tolerances": {"identity": 1e-12, ...}            // optional overrides
 *   }
 *
 * For d = 1 a support point may be written as a plain number instead of
 * a one-element array. Unknown keys are rejected so typos cannot pass
 * silently. All emitted numbers carry 17 significant digits, enough to
 * reproduce every double exactly on re-parse.
 */

struct scenario_file {
    sequence seq;
    check_options options{};
};

/// Parses and validates a scenario document. Error messages name the
/// offending field and the violated constraint.
scenario_file parse_scenario(const std::string& text);

/// Serializes a sequence as a version-1 scenario document (expanded
/// form, no iid shorthand). parse_scenario(serialize_scenario(seq))
/// reproduces an equal sequence.
std::string serialize_scenario(const sequence& seq);

/// Serializes a check report; pass flags are emitted alongside the
/// numbers and tolerances they are derived from.
std::string report_json(const check_report& r);

/// JSON error object for machine-readable failure reporting.
std::string error_json(const std::string& kind, const std::string& message);

/// One number, 17 significant digits (exact double round-trip).
std::string format_number(double v);

struct sweep_result {
    std::string csv;        // header line `n,lhs,bound,gap` plus one row per n
    std::size_t rows = 0;   // data rows emitted
    bool truncated = false; // stopped before n_max on a resource limit
    std::string note;       // truncation description when truncated
};

/**
 * Concentration table for the iid sequence built from `base`: for each
 * n in 1..n_max, the upper expectation of the squared distance of the
 * sample mean, the variance-proxy bound, and their gap. Stops early
 * (with a note) when a resource limit is hit.
 */
sweep_result sweep(const marginal& base, std::size_t n_max,
                   const eval_options& opts = {});

} // namespace credal
