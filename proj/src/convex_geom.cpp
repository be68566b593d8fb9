#include "credal/convex_geom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>

namespace credal {

// *******************************************************
// polytope basics
// *******************************************************

polytope::polytope(std::vector<numvec> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty())
        throw invalid_input("polytope: vertex list is empty");
    dim_ = vertices_.front().size();
    if (dim_ == 0)
        throw invalid_input("polytope: vertices must have dimension >= 1");
    for (std::size_t i = 0; i < vertices_.size(); i++) {
        if (vertices_[i].size() != dim_)
            throw invalid_input("polytope: vertex " + std::to_string(i) +
                                " has dimension " + std::to_string(vertices_[i].size()) +
                                ", expected " + std::to_string(dim_));
        if (!all_finite(vertices_[i]))
            throw invalid_input("polytope: vertex " + std::to_string(i) +
                                " is not finite");
    }
}

support_result support_value(const polytope& poly, const numvec& direction) {
    if (direction.size() != poly.dimension())
        throw invalid_input("support_value: direction has dimension " +
                            std::to_string(direction.size()) + ", expected " +
                            std::to_string(poly.dimension()));
    if (!all_finite(direction))
        throw invalid_input("support_value: direction is not finite");
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < poly.vertex_count(); i++) {
        const double v = dot(direction, poly.vertices()[i]);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    return {best, arg};
}

// *******************************************************
// Wolfe nearest-point method
// *******************************************************

namespace {

constexpr double kStopTol = 1e-12;     // duality-gap threshold on squared distance
constexpr double kWeightTol = 1e-12;   // weights below this count as zero
constexpr std::size_t kIterationCap = 100000;

/// Solve a small dense symmetric system by Gaussian elimination with
/// partial pivoting. Falls back to a diagonal ridge when near-singular
/// (affinely dependent corral points).
bool solve_dense(std::vector<numvec> a, numvec b, numvec& out) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; col++) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; r++)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; r++) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; c++)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    out.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; c++)
            s -= a[r][c] * out[c];
        out[r] = s / a[r][r];
    }
    for (double v : out)
        if (!std::isfinite(v)) return false;
    return true;
}

/**
 * Affine minimizer over the corral: weights alpha with sum 1 minimizing
 * |sum alpha_a q_{S[a]}|^2, via the system (ee^T + G) beta = e followed by
 * normalization. A tiny ridge handles affinely dependent corrals.
 */
bool affine_minimizer(std::span<const numvec> points, const numvec& x,
                      const indexvec& corral, numvec& alpha) {
    const std::size_t k = corral.size();
    std::vector<numvec> sys(k, numvec(k));
    double trace = 0.0;
    for (std::size_t a = 0; a < k; a++) {
        for (std::size_t b = a; b < k; b++) {
            // Gram entry of the shifted points q_i = v_i - x
            double g = 0.0;
            const numvec& va = points[corral[a]];
            const numvec& vb = points[corral[b]];
            for (std::size_t c = 0; c < x.size(); c++)
                g += (va[c] - x[c]) * (vb[c] - x[c]);
            sys[a][b] = sys[b][a] = 1.0 + g;
        }
        trace += sys[a][a];
    }
    numvec rhs(k, 1.0);
    double ridge = 0.0;
    for (int attempt = 0; attempt < 3; attempt++) {
        std::vector<numvec> work = sys;
        if (ridge > 0.0)
            for (std::size_t a = 0; a < k; a++)
                work[a][a] += ridge;
        if (solve_dense(std::move(work), rhs, alpha)) {
            const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
            if (std::isfinite(total) && std::abs(total) > 1e-300) {
                for (double& v : alpha)
                    v /= total;
                return true;
            }
        }
        ridge = (ridge == 0.0) ? 1e-13 * std::max(1.0, trace / double(k)) : ridge * 1e3;
    }
    return false;
}

projection wolfe_nearest(std::span<const numvec> points, const numvec& x) {
    const std::size_t m = points.size();
    const std::size_t dim = x.size();

    // scale for the stopping rule
    double scale = 1.0;
    for (const numvec& v : points)
        scale = std::max(scale, squared_distance(v, x));

    // start from the closest input point
    std::size_t start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; i++) {
        const double d2 = squared_distance(points[i], x);
        if (d2 < best) {
            best = d2;
            start = i;
        }
    }

    indexvec corral{start};
    numvec weights{1.0};
    numvec w(dim); // current point minus x
    for (std::size_t c = 0; c < dim; c++)
        w[c] = points[start][c] - x[c];

    auto rebuild_w = [&]() {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t a = 0; a < corral.size(); a++)
            for (std::size_t c = 0; c < dim; c++)
                w[c] += weights[a] * (points[corral[a]][c] - x[c]);
    };

    auto residual = [&]() {
        // max_i <x - y, v_i - y> with y = x + w
        const double w2 = squared_norm(w);
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; i++) {
            double dp = 0.0;
            for (std::size_t c = 0; c < dim; c++)
                dp += w[c] * (points[i][c] - x[c]);
            worst = std::max(worst, w2 - dp);
        }
        return worst;
    };

    std::size_t iterations = 0;
    bool converged = false;
    while (iterations < kIterationCap) {
        iterations++;
        const double w2 = squared_norm(w);

        // most improving point: argmin <w, q_i>
        std::size_t j = 0;
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; i++) {
            double dp = 0.0;
            for (std::size_t c = 0; c < dim; c++)
                dp += w[c] * (points[i][c] - x[c]);
            if (dp < lowest) {
                lowest = dp;
                j = i;
            }
        }
        if (lowest >= w2 - kStopTol * scale) {
            converged = true;
            break;
        }
        if (std::find(corral.begin(), corral.end(), j) != corral.end()) {
            // numerical stall; the certificate check below arbitrates
            break;
        }
        corral.push_back(j);
        weights.push_back(0.0);

        // minor cycles: pull the corral back to a proper face
        while (true) {
            numvec alpha;
            if (!affine_minimizer(points, x, corral, alpha)) {
                // degenerate corral; drop the newest point and move on
                corral.pop_back();
                weights.pop_back();
                rebuild_w();
                break;
            }
            const double lo = *std::min_element(alpha.begin(), alpha.end());
            if (lo > kWeightTol) {
                weights = alpha;
                rebuild_w();
                break;
            }
            double theta = 1.0;
            for (std::size_t a = 0; a < corral.size(); a++)
                if (alpha[a] <= kWeightTol && weights[a] - alpha[a] > 0.0)
                    theta = std::min(theta, weights[a] / (weights[a] - alpha[a]));
            indexvec next_corral;
            numvec next_weights;
            for (std::size_t a = 0; a < corral.size(); a++) {
                const double v = (1.0 - theta) * weights[a] + theta * alpha[a];
                if (v <= kWeightTol) continue;
                next_corral.push_back(corral[a]);
                next_weights.push_back(v);
            }
            if (next_corral.empty()) {
                // numerically everything collapsed; keep the newest point
                next_corral.push_back(corral.back());
                next_weights.push_back(1.0);
            }
            corral = std::move(next_corral);
            weights = std::move(next_weights);
            const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            if (total > 1e-300)
                for (double& v : weights)
                    v /= total;
            else
                std::fill(weights.begin(), weights.end(), 1.0 / double(weights.size()));
            rebuild_w();
        }
    }

    const double cert = residual();
    if (!converged && cert > 1e-8 * scale)
        throw convergence_failure("projection failed to certify optimality; residual " +
                                      std::to_string(cert),
                                  cert);

    projection out;
    out.point.resize(dim);
    for (std::size_t c = 0; c < dim; c++)
        out.point[c] = x[c] + w[c];
    out.distance = std::sqrt(squared_norm(w));
    out.coefficients.assign(m, 0.0);
    for (std::size_t a = 0; a < corral.size(); a++)
        out.coefficients[corral[a]] += weights[a];
    out.certificate = cert;
    out.iterations = iterations;
    return out;
}

} // namespace

projection project(const polytope& poly, const numvec& x) {
    if (x.size() != poly.dimension())
        throw invalid_input("project: point has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(poly.dimension()));
    if (!all_finite(x))
        throw invalid_input("project: point is not finite");
    return wolfe_nearest(poly.vertices(), x);
}

double hull_distance(std::span<const numvec> points, const numvec& x) {
    if (points.empty())
        throw invalid_input("hull_distance: point list is empty");
    return wolfe_nearest(points, x).distance;
}

// *******************************************************
// vertex filtering
// *******************************************************

namespace {

/// Lexicographic sort + adjacent merge. Collapses the exact and
/// near-exact duplicates that vertex-sum enumeration mass-produces;
/// the exact redundancy rule still runs afterwards.
std::vector<numvec> dedupe(std::vector<numvec> points) {
    std::sort(points.begin(), points.end());
    std::vector<numvec> out;
    out.reserve(points.size());
    for (numvec& p : points) {
        if (!out.empty()) {
            bool same = true;
            for (std::size_t c = 0; c < p.size() && same; c++)
                same = std::abs(p[c] - out.back()[c]) <= 1e-12;
            if (same) continue;
        }
        out.push_back(std::move(p));
    }
    return out;
}

/**
 * Permissive planar pre-reduction (monotone chain) for large d=2 point
 * sets. A point is discarded only when it is clearly on the interior
 * side of both chains; anything near the boundary survives so the exact
 * redundancy rule below makes every final decision.
 */
std::vector<numvec> prereduce_2d(std::vector<numvec> points) {
    if (points.size() < 16) return points;
    std::sort(points.begin(), points.end());
    const auto cross = [](const numvec& o, const numvec& a, const numvec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    double span = 0.0;
    for (const numvec& p : points)
        span = std::max({span, std::abs(p[0]), std::abs(p[1])});
    const double margin = 1e-9 * std::max(1.0, span * span);

    auto chain = [&](auto begin, auto end) {
        std::vector<numvec> hull;
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= 2 &&
                   cross(hull[hull.size() - 2], hull.back(), *it) >= margin)
                hull.pop_back();
            hull.push_back(*it);
        }
        return hull;
    };
    std::vector<numvec> forward = chain(points.begin(), points.end());
    std::vector<numvec> backward = chain(points.rbegin(), points.rend());
    forward.insert(forward.end(), backward.begin() + 1, backward.end() - 1);
    return dedupe(std::move(forward));
}

std::vector<numvec> prereduce_1d(std::vector<numvec> points) {
    if (points.size() < 16) return points;
    double lo = points.front()[0], hi = lo;
    for (const numvec& p : points) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    std::vector<numvec> out;
    for (numvec& p : points)
        if (p[0] <= lo + 2 * vertex_redundancy_tol ||
            p[0] >= hi - 2 * vertex_redundancy_tol)
            out.push_back(std::move(p));
    return out;
}

} // namespace

polytope extreme_filter(const std::vector<numvec>& points) {
    if (points.empty())
        throw invalid_input("extreme_filter: point list is empty");
    // reuse the dimension/finiteness validation
    polytope raw(points);

    std::vector<numvec> pool = dedupe(points);
    if (raw.dimension() == 1)
        pool = prereduce_1d(std::move(pool));
    else if (raw.dimension() == 2)
        pool = prereduce_2d(std::move(pool));

    // a point is a vertex iff it is not within tolerance of the hull of
    // the others; test from the back so ties keep the earliest point
    std::vector<bool> keep(pool.size(), true);
    std::size_t remaining = pool.size();
    std::vector<numvec> others;
    for (std::size_t i = pool.size(); i-- > 0 && remaining > 1;) {
        others.clear();
        for (std::size_t j = 0; j < pool.size(); j++)
            if (keep[j] && j != i) others.push_back(pool[j]);
        if (hull_distance(others, pool[i]) <= vertex_redundancy_tol) {
            keep[i] = false;
            remaining--;
        }
    }
    std::vector<numvec> vertices;
    vertices.reserve(remaining);
    for (std::size_t j = 0; j < pool.size(); j++)
        if (keep[j]) vertices.push_back(pool[j]);
    return polytope(std::move(vertices));
}

// *******************************************************
// Minkowski average
// *******************************************************

polytope minkowski_average(std::span<const polytope> polys, double combination_limit) {
    if (polys.empty())
        throw invalid_input("minkowski_average: no polytopes given");
    const std::size_t dim = polys.front().dimension();
    double combos = 1.0;
    for (const polytope& p : polys) {
        if (p.dimension() != dim)
            throw invalid_input("minkowski_average: mixed dimensions");
        combos *= double(p.vertex_count());
    }
    if (combos > combination_limit)
        throw budget_exceeded("vertex-sum combination count " +
                                  std::to_string(std::uint64_t(combos)) +
                                  " exceeds budget " +
                                  std::to_string(std::uint64_t(combination_limit)),
                              combos, combination_limit);

    const double inv = 1.0 / double(polys.size());
    std::vector<numvec> sums;
    sums.reserve(std::size_t(combos));
    numvec acc(dim, 0.0);
    // depth-first over one vertex per polytope
    auto walk = [&](auto&& self, std::size_t level) -> void {
        if (level == polys.size()) {
            numvec scaled(dim);
            for (std::size_t c = 0; c < dim; c++)
                scaled[c] = acc[c] * inv;
            sums.push_back(std::move(scaled));
            return;
        }
        for (const numvec& v : polys[level].vertices()) {
            for (std::size_t c = 0; c < dim; c++)
                acc[c] += v[c];
            self(self, level + 1);
            for (std::size_t c = 0; c < dim; c++)
                acc[c] -= v[c];
        }
    };
    walk(walk, 0);
    return extreme_filter(sums);
}

} // namespace credal
