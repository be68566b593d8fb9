#pragma once

#include "credal/definitions.hpp"

#include <span>

namespace credal {

/// Tolerance deciding "is a vertex": a point is redundant iff its
/// distance to the hull of the remaining points is at most this. The
/// single source of geometric truth for vertex filtering.
inline constexpr double vertex_redundancy_tol = 1e-9;

/// Membership threshold: a point belongs to a polytope iff its
/// projection distance is at most this.
inline constexpr double membership_tol = 1e-9;

/**
 * Convex compact polytope in vertex representation. All stored points
 * are extreme (irredundant); support values, membership and projections
 * are computed from the vertices alone, so no facet enumeration is ever
 * needed. Degenerate shapes (single point, collinear sets, zero-volume
 * hulls) are first-class.
 */
class polytope {
public:
    /// Wraps an already-irredundant vertex list. Checks dimensions and
    /// finiteness only; use extreme_filter to canonicalize raw points.
    explicit polytope(std::vector<numvec> vertices);

    std::size_t dimension() const { return dim_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    const std::vector<numvec>& vertices() const { return vertices_; }

private:
    std::vector<numvec> vertices_;
    std::size_t dim_;
};

struct support_result {
    double value;
    /// Attaining vertex; lowest index on ties.
    std::size_t vertex;
};

/// Support function: max over vertices of <p, v>.
support_result support_value(const polytope& poly, const numvec& direction);

/**
 * Nearest point of a polytope. `coefficients` are convex weights over
 * the polytope's vertices reproducing `point`; `certificate` is the
 * variational-inequality residual max_v <x - point, v - point>, which is
 * <= 0 at the exact solution.
 */
struct projection {
    numvec point;
    double distance;
    numvec coefficients;
    double certificate;
    std::size_t iterations;
};

/**
 * Nearest-point projection onto the polytope, solving
 * min |x - sum_j w_j v_j|^2 over the simplex of weights with Wolfe's
 * nearest-point method. Terminates with certificate below 1e-12 (scaled);
 * throws convergence_failure reporting the residual if the iteration cap
 * of 1e5 passes without one.
 *
 * Membership test: project(poly, x).distance <= membership_tol.
 */
projection project(const polytope& poly, const numvec& x);

/// Distance from x to the hull of an arbitrary point list (the list need
/// not be irredundant). Used by extreme_filter.
double hull_distance(std::span<const numvec> points, const numvec& x);

/**
 * Canonicalizes a V-representation: deduplicates and removes every point
 * whose distance to the hull of the others is at most
 * vertex_redundancy_tol. Surviving points keep their input order.
 * Throws invalid_input on an empty list.
 */
polytope extreme_filter(const std::vector<numvec>& points);

/**
 * Minkowski average (1/n)(P_1 + ... + P_n), computed as the filtered set
 * of all n-fold vertex-sum combinations scaled by 1/n.
 *
 * Throws budget_exceeded when the combination count exceeds the limit
 * (default: the path enumeration budget).
 */
polytope minkowski_average(std::span<const polytope> polys, double combination_limit = 1e7);

} // namespace credal
