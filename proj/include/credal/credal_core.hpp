#pragma once

#include "credal/definitions.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace credal {

// *******************************************************
// Domain types
// *******************************************************

/**
 * A finite discrete sublinear distribution: support points in R^d and a
 * finite list of generating probability vectors. The induced upper
 * expectation is the maximum of the generator expectations; the credal
 * set it represents is the convex hull of the generators.
 */
class marginal {
public:
    /**
     * Validates and stores a marginal.
     *
     * @param support  m distinct points, each of dimension d >= 1
     * @param generators K >= 1 probability vectors of length m
     *        (entries >= 0, sum within 1e-12 of one)
     * @param label optional identifier used in reports
     *
     * Throws invalid_input naming the offending field on any violation.
     */
    marginal(std::vector<numvec> support, std::vector<numvec> generators,
             std::string label = {});

    std::size_t dimension() const { return dim_; }
    std::size_t support_size() const { return support_.size(); }
    std::size_t generator_count() const { return generators_.size(); }

    const std::vector<numvec>& support() const { return support_; }
    const std::vector<numvec>& generators() const { return generators_; }
    const std::string& label() const { return label_; }

    /// Mean of one generator: sum_j p_j x_j.
    numvec generator_mean(std::size_t k) const;
    /// Second moment of one generator: sum_j p_j |x_j|^2.
    double generator_second_moment(std::size_t k) const;

private:
    std::vector<numvec> support_;
    std::vector<numvec> generators_;
    std::string label_;
    std::size_t dim_;
};

/**
 * An ordered list of marginals with a common dimension. The order is
 * semantically significant: each coordinate is independent of the
 * preceding ones in the sequential (backward-induction) sense, which is
 * order-sensitive in general.
 */
class sequence {
public:
    explicit sequence(std::vector<marginal> marginals);

    std::size_t size() const { return marginals_.size(); }
    std::size_t dimension() const { return marginals_.front().dimension(); }
    const marginal& at(std::size_t i) const { return marginals_.at(i); }
    const std::vector<marginal>& marginals() const { return marginals_; }

    /// Exact product path count (prod m_i), as a double to avoid overflow.
    double path_count() const;

private:
    std::vector<marginal> marginals_;
};

/**
 * Mixed-radix indexer over the product path space of a sequence.
 * Path ids are row-major: earlier coordinates are more significant,
 * id = ((j1 * m2) + j2) * m3 + ... Prefix ids follow the same rule on
 * truncated index tuples.
 */
class path_space {
public:
    /// Throws budget_exceeded (naming the path count) if prod m_i > limit.
    path_space(const sequence& seq, double limit);

    std::size_t path_count() const { return total_; }
    std::size_t levels() const { return radices_.size(); }
    std::size_t radix(std::size_t level) const { return radices_[level]; }

    /// Number of prefix nodes before level i, i.e. prod_{l<i} m_l.
    std::size_t prefix_count(std::size_t level) const { return prefix_counts_[level]; }

    /// Decode a path id into per-level support indices.
    indexvec decode(std::size_t path_id) const;
    /// Flat id of the length-`level` prefix of `indices`.
    std::size_t prefix_id(std::span<const std::size_t> indices, std::size_t level) const;

private:
    indexvec radices_;
    indexvec prefix_counts_;
    std::size_t total_;
};

/**
 * A real-valued function on full paths (x_1, ..., x_n), supplied either
 * as a callable over the path's points (or support indices) or as a
 * dense table indexed by path id. Tabulation validates finiteness at
 * every path.
 */
class path_function {
public:
    using point_fn = std::function<double(std::span<const numvec>)>;
    using index_fn = std::function<double(std::span<const std::size_t>)>;

    static path_function from_points(point_fn f);
    static path_function from_indices(index_fn f);
    /// Dense table indexed by row-major path id.
    static path_function from_table(numvec values);

    /// Evaluate on every path of `seq` in path-id order.
    /// Throws invalid_input on a non-finite value (naming the path id)
    /// or on a table-size mismatch.
    numvec tabulate(const sequence& seq, const path_space& paths) const;

private:
    path_function() = default;
    point_fn point_fn_;
    index_fn index_fn_;
    numvec table_;
    bool tabular_ = false;
};

/**
 * A choice of generator index at every prefix-tree node: choice[i][q] is
 * the generator used for marginal i at prefix node q (ids per path_space).
 * Each selection induces one product probability measure on the path
 * space; the selections are exactly the extreme points of the rectangular
 * credal set of the independent sequence.
 */
struct adapted_selection {
    std::vector<indexvec> choice;
};

// *******************************************************
// Operations
// *******************************************************

struct upper_expectation_result {
    double value;
    /// Index of the maximizing generator; lowest index on ties.
    std::size_t generator;
};

/// Upper expectation of a function given by its values on the support
/// points: max over generators of sum_j p_j f(x_j).
upper_expectation_result upper_expectation(const marginal& m, const numvec& values);

/// Same, evaluating f on each support point. Throws invalid_input on a
/// non-finite value.
upper_expectation_result upper_expectation(const marginal& m,
                                           const std::function<double(const numvec&)>& f);

struct eval_options {
    budget limits{};
};

/**
 * Upper expectation of F(X_1, ..., X_n) for the independent sequence,
 * computed by backward induction: the last coordinate is folded with the
 * marginal upper expectation at every prefix, then the recursion moves
 * one level up. Equals upper_expectation when n = 1.
 *
 * Throws budget_exceeded when the path count is over budget.
 */
double product_expectation(const sequence& seq, const path_function& f,
                           const eval_options& opts = {});

/// As above, on a pre-tabulated path table (values indexed by path id).
double product_expectation_table(const sequence& seq, const path_space& paths,
                                 const numvec& table);

/**
 * Streams every adapted selection of the sequence exactly once, in
 * lexicographic node order. Brute-force oracle for the rectangular
 * credal set; intended for tests and small scenarios.
 *
 * The constructor throws budget_exceeded when the total selection count
 * prod_i K_i^(#prefixes at level i) exceeds opts.limits.selections.
 */
class adapted_selection_enumerator {
public:
    adapted_selection_enumerator(const sequence& seq, const eval_options& opts = {});

    /// Total number of selections (exact while within budget).
    double count() const { return count_; }

    /// Next selection, or nullopt when exhausted.
    std::optional<adapted_selection> next();

private:
    std::vector<indexvec> digits_; // current selection, node-major
    indexvec node_radix_;          // K_i per level
    double count_;
    bool done_ = false;
    bool first_ = true;
};

/// E_P[F] for the product measure induced by the selection:
/// sum over paths of P(path) * F(path).
double expectation_under(const sequence& seq, const adapted_selection& sel,
                         const path_function& f, const eval_options& opts = {});

/// Total probability mass of the induced measure (should be 1).
double selection_total_mass(const sequence& seq, const adapted_selection& sel,
                            const eval_options& opts = {});

/**
 * Conditional mean of coordinate i at a prefix node: the mean of the
 * generator selected there. `prefix` holds the i leading support indices
 * (only the first i entries are read).
 *
 * Throws index_error on an invalid level or prefix.
 */
numvec conditional_mean(const sequence& seq, const adapted_selection& sel,
                        std::size_t level, std::span<const std::size_t> prefix);

} // namespace credal
