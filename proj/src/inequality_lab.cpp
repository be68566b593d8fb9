#include "credal/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "credal/rng.hpp"

namespace credal {

polytope mean_set(const marginal& m) {
    std::vector<numvec> means;
    means.reserve(m.generator_count());
    for (std::size_t k = 0; k < m.generator_count(); k++)
        means.push_back(m.generator_mean(k));
    return extreme_filter(means);
}

double mean_support(const marginal& m, const numvec& direction) {
    if (direction.size() != m.dimension())
        throw invalid_input("mean_support: direction has dimension " +
                            std::to_string(direction.size()) + ", expected " +
                            std::to_string(m.dimension()));
    numvec values(m.support_size());
    for (std::size_t j = 0; j < m.support_size(); j++)
        values[j] = dot(direction, m.support()[j]);
    return upper_expectation(m, values).value;
}

// *******************************************************
// variance proxy
// *******************************************************

namespace {

constexpr double kGapTol = 1e-12;
constexpr std::size_t kSigmaIterationCap = 100000;

struct sigma_solution {
    double value;
    numvec theta;
    std::size_t iterations;
    double gap;
};

/**
 * inf over theta in conv(means) of max_k (c_k - 2<theta, m_k> + |theta|^2),
 * solved on the concave dual max over simplex mu of <c, mu> - |M mu|^2
 * (the primal minimizer is theta = M mu, automatically feasible).
 * Conditional gradient with away steps and exact line search; the
 * primal-dual sandwich certifies the result.
 */
sigma_solution solve_sigma(const marginal& m) {
    const std::size_t count = m.generator_count();
    const std::size_t dim = m.dimension();
    std::vector<numvec> means(count);
    numvec second(count);
    for (std::size_t k = 0; k < count; k++) {
        means[k] = m.generator_mean(k);
        second[k] = m.generator_second_moment(k);
    }

    numvec mu(count, 1.0 / double(count));
    numvec theta(dim, 0.0);
    auto rebuild_theta = [&]() {
        std::fill(theta.begin(), theta.end(), 0.0);
        for (std::size_t k = 0; k < count; k++)
            for (std::size_t c = 0; c < dim; c++)
                theta[c] += mu[k] * means[k][c];
    };
    rebuild_theta();

    double gap = std::numeric_limits<double>::infinity();
    double primal = 0.0;
    std::size_t iter = 0;
    numvec grad(count), delta(count), image(dim);
    for (; iter < kSigmaIterationCap; iter++) {
        const double theta_sq = squared_norm(theta);
        double worst_lin = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < count; k++) {
            const double lin = 2.0 * dot(means[k], theta);
            grad[k] = lin - second[k];
            worst_lin = std::max(worst_lin, second[k] - lin);
        }
        primal = worst_lin + theta_sq;
        const double dual = dot(second, mu) - theta_sq;
        gap = primal - dual;
        if (gap <= kGapTol * std::max(1.0, std::abs(primal)))
            break;

        std::size_t toward = 0;
        for (std::size_t k = 1; k < count; k++)
            if (grad[k] < grad[toward]) toward = k;
        std::size_t away = count;
        for (std::size_t k = 0; k < count; k++)
            if (mu[k] > 1e-16 && (away == count || grad[k] > grad[away])) away = k;

        const double mu_grad = dot(mu, grad);
        const double toward_gain = mu_grad - grad[toward];
        const double away_gain = (away < count) ? grad[away] - mu_grad : -1.0;
        const bool use_toward =
            toward_gain >= away_gain || away == count || mu[away] >= 1.0 - 1e-16;

        double gamma_max;
        if (use_toward) {
            for (std::size_t k = 0; k < count; k++)
                delta[k] = -mu[k];
            delta[toward] += 1.0;
            gamma_max = 1.0;
        } else {
            delta = mu;
            delta[away] -= 1.0;
            gamma_max = mu[away] / (1.0 - mu[away]);
        }

        std::fill(image.begin(), image.end(), 0.0);
        for (std::size_t k = 0; k < count; k++)
            for (std::size_t c = 0; c < dim; c++)
                image[c] += delta[k] * means[k][c];
        const double curve = 2.0 * squared_norm(image);
        const double slope = dot(grad, delta); // < 0 for an improving direction
        const double gamma = (curve > 1e-300)
                                 ? std::clamp(-slope / curve, 0.0, gamma_max)
                                 : (slope < 0.0 ? gamma_max : 0.0);
        if (gamma <= 0.0) break; // no progress possible; certificate arbitrates

        double total = 0.0;
        for (std::size_t k = 0; k < count; k++) {
            mu[k] = std::max(mu[k] + gamma * delta[k], 0.0);
            total += mu[k];
        }
        for (std::size_t k = 0; k < count; k++)
            mu[k] /= total;
        rebuild_theta();
    }

    if (gap > 1e-8 * std::max(1.0, std::abs(primal)))
        throw convergence_failure(
            "variance proxy solver failed to close the duality gap; residual " +
                std::to_string(gap),
            gap);
    return {std::max(primal, 0.0), theta, iter, std::max(gap, 0.0)};
}

} // namespace

variance_proxy_result variance_proxy(const sequence& seq) {
    variance_proxy_result out;
    out.per_index.reserve(seq.size());
    out.minimizers.reserve(seq.size());
    for (const marginal& m : seq.marginals()) {
        sigma_solution s = solve_sigma(m);
        out.per_index.push_back(s.value);
        out.minimizers.push_back(std::move(s.theta));
        out.iterations = std::max(out.iterations, s.iterations);
        out.residual = std::max(out.residual, s.gap);
        out.value = std::max(out.value, s.value);
    }
    return out;
}

// *******************************************************
// distance functionals of the sample mean
// *******************************************************

namespace {

std::vector<polytope> mean_sets(const sequence& seq) {
    std::vector<polytope> sets;
    sets.reserve(seq.size());
    for (const marginal& m : seq.marginals())
        sets.push_back(mean_set(m));
    return sets;
}

/// Per-path squared distances of the sample mean to the averaged mean
/// set: by projection distance, and recomputed against the projection
/// point (the value any feasible plan must dominate).
void tabulate_distances(const sequence& seq, const path_space& paths,
                        const polytope& theta, numvec& rho_sq, numvec& attained_sq) {
    const std::size_t n = seq.size();
    const std::size_t dim = seq.dimension();
    const double inv = 1.0 / double(n);
    rho_sq.resize(paths.path_count());
    attained_sq.resize(paths.path_count());
    numvec mean(dim);
    for (std::size_t id = 0; id < paths.path_count(); id++) {
        const indexvec idx = paths.decode(id);
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t level = 0; level < n; level++) {
            const numvec& x = seq.at(level).support()[idx[level]];
            for (std::size_t c = 0; c < dim; c++)
                mean[c] += x[c] * inv;
        }
        const projection p = project(theta, mean);
        rho_sq[id] = p.distance * p.distance;
        attained_sq[id] = squared_distance(mean, p.point);
    }
}

} // namespace

double mean_distance_sq(const sequence& seq, const eval_options& opts) {
    const path_space paths(seq, opts.limits.paths);
    const std::vector<polytope> sets = mean_sets(seq);
    const polytope theta = minkowski_average(sets, opts.limits.paths);
    numvec rho_sq, attained_sq;
    tabulate_distances(seq, paths, theta, rho_sq, attained_sq);
    return product_expectation_table(seq, paths, rho_sq);
}

double minimax_distance_sq(const sequence& seq, const eval_options& opts) {
    const path_space paths(seq, opts.limits.paths);
    const std::vector<polytope> sets = mean_sets(seq);
    const polytope theta = minkowski_average(sets, opts.limits.paths);
    numvec rho_sq, attained_sq;
    tabulate_distances(seq, paths, theta, rho_sq, attained_sq);
    return product_expectation_table(seq, paths, attained_sq);
}

double scalar_deviation_sq(const sequence& seq, const eval_options& opts) {
    if (seq.dimension() != 1)
        throw invalid_input("scalar_deviation_sq: requires dimension 1, got " +
                            std::to_string(seq.dimension()));
    const double inv = 1.0 / double(seq.size());
    double hi = 0.0, lo = 0.0;
    for (const marginal& m : seq.marginals()) {
        numvec plus(m.support_size()), minus(m.support_size());
        for (std::size_t j = 0; j < m.support_size(); j++) {
            plus[j] = m.support()[j][0];
            minus[j] = -m.support()[j][0];
        }
        hi += upper_expectation(m, plus).value * inv;
        lo -= upper_expectation(m, minus).value * inv;
    }
    const path_function f =
        path_function::from_points([hi, lo](std::span<const numvec> xs) {
            double s = 0.0;
            for (const numvec& x : xs)
                s += x[0];
            s /= double(xs.size());
            const double dev = std::max(s - hi, 0.0) + std::max(lo - s, 0.0);
            return dev * dev;
        });
    return product_expectation(seq, f, opts);
}

// *******************************************************
// the full check
// *******************************************************

void apply_flags(check_report& r) {
    const check_tolerances& tol = r.tolerances;
    const double slack = tol.inequality_slack * (1.0 + r.bound);
    r.concentration_ok = r.mean_distance <= r.bound + slack;
    r.minimax_ok =
        r.minimax_gap <= tol.minimax && r.minimax_distance <= r.bound + slack;
    r.mean_set_ok =
        r.support_mismatch <= tol.identity && r.membership_excess <= tol.membership;
    r.conditional_ok = r.conditional_excess <= tol.conditional;
    r.scalar_ok = !r.scalar_applicable || r.scalar_gap <= tol.identity;
}

check_report certify(const sequence& seq, const check_options& opts) {
    check_report r;
    r.dimension = seq.dimension();
    r.n = seq.size();
    r.tolerances = opts.tol;
    r.seed = opts.seed;
    r.directions = opts.directions;
    r.rng_algorithm = rng_name;
    for (const marginal& m : seq.marginals())
        if (!m.label().empty()) {
            r.scenario = m.label();
            break;
        }

    const std::vector<polytope> sets = mean_sets(seq);
    for (const polytope& p : sets)
        r.marginal_mean_vertices.push_back(p.vertices());
    const polytope theta = minkowski_average(sets, opts.eval.limits.paths);
    r.mean_vertices = theta.vertices();

    const variance_proxy_result sigma = variance_proxy(seq);
    r.variance_per_index = sigma.per_index;
    r.variance_proxy = sigma.value;
    r.bound = sigma.value / double(seq.size());

    const path_space paths(seq, opts.eval.limits.paths);
    numvec rho_sq, attained_sq;
    tabulate_distances(seq, paths, theta, rho_sq, attained_sq);
    r.mean_distance = product_expectation_table(seq, paths, rho_sq);
    r.minimax_distance = product_expectation_table(seq, paths, attained_sq);
    r.minimax_gap = std::abs(r.minimax_distance - r.mean_distance);

    r.scalar_applicable = (seq.dimension() == 1);
    if (r.scalar_applicable) {
        r.scalar_deviation = scalar_deviation_sq(seq, opts.eval);
        r.scalar_gap = std::abs(r.scalar_deviation - r.mean_distance);
    }

    // sampled-direction support match and the conditional test family
    rng gen(opts.seed);
    for (std::size_t i = 0; i < seq.size(); i++) {
        const marginal& m = seq.at(i);
        const std::size_t points = m.support_size();

        numvec box_lo(m.dimension()), box_hi(m.dimension());
        for (std::size_t c = 0; c < m.dimension(); c++) {
            box_lo[c] = box_hi[c] = m.support()[0][c];
            for (const numvec& x : m.support()) {
                box_lo[c] = std::min(box_lo[c], x[c]);
                box_hi[c] = std::max(box_hi[c], x[c]);
            }
        }

        numvec values(points);
        for (std::size_t t = 0; t < opts.directions; t++) {
            const numvec dir = gen.direction(m.dimension());
            for (std::size_t j = 0; j < points; j++)
                values[j] = dot(dir, m.support()[j]);
            const double via_expectation = upper_expectation(m, values).value;
            const double via_polytope = support_value(sets[i], dir).value;
            r.support_mismatch =
                std::max(r.support_mismatch, std::abs(via_expectation - via_polytope));

            // conditional bound on the linear test function
            for (std::size_t k = 0; k < m.generator_count(); k++) {
                const double under_k = dot(m.generators()[k], values);
                r.conditional_excess =
                    std::max(r.conditional_excess, under_k - via_expectation);
            }

            // conditional bound on a squared-distance test function
            numvec target(m.dimension());
            for (std::size_t c = 0; c < m.dimension(); c++)
                target[c] = gen.uniform(box_lo[c], box_hi[c]);
            for (std::size_t j = 0; j < points; j++)
                values[j] = squared_distance(m.support()[j], target);
            const double upper_sq = upper_expectation(m, values).value;
            for (std::size_t k = 0; k < m.generator_count(); k++) {
                const double under_k = dot(m.generators()[k], values);
                r.conditional_excess =
                    std::max(r.conditional_excess, under_k - upper_sq);
            }
        }

        // every generator mean must lie in the mean set
        for (std::size_t k = 0; k < m.generator_count(); k++) {
            const double dist = project(sets[i], m.generator_mean(k)).distance;
            r.membership_excess = std::max(r.membership_excess, dist);
        }
    }

    apply_flags(r);
    return r;
}

} // namespace credal
