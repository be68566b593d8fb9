#include "credal/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "credal/rng.hpp"
#include "credal/scenario.hpp"
#include "json_io.hpp"

namespace credal {

namespace {

constexpr double kAdditivityTol = 1e-9;  // support-value additivity
constexpr double kPlanSlack = 1e-9;      // feasible plans may undercut by this
constexpr double kCertificateTol = 1e-8; // projection optimality certificate
constexpr std::size_t kMassChecks = 64;  // selections per trial with mass audit

double scale_of(double a, double b = 0.0, double c = 0.0) {
    return std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
}

numvec path_mean(const sequence& seq, const path_space& paths, std::size_t id) {
    const indexvec idx = paths.decode(id);
    numvec mean(seq.dimension(), 0.0);
    const double inv = 1.0 / double(seq.size());
    for (std::size_t level = 0; level < seq.size(); level++) {
        const numvec& x = seq.at(level).support()[idx[level]];
        for (std::size_t c = 0; c < mean.size(); c++)
            mean[c] += x[c] * inv;
    }
    return mean;
}

bool sequences_equal(const sequence& a, const sequence& b) {
    if (a.size() != b.size() || a.dimension() != b.dimension()) return false;
    for (std::size_t i = 0; i < a.size(); i++) {
        const marginal &ma = a.at(i), &mb = b.at(i);
        if (ma.label() != mb.label() || ma.support() != mb.support() ||
            ma.generators() != mb.generators())
            return false;
    }
    return true;
}

struct trial_context {
    trial_context(const fuzz_config& config, fuzz_summary& summary)
        : cfg(config), s(summary) {}

    const fuzz_config& cfg;
    fuzz_summary& s;
    bool ok = true;
    std::string note;

    void check(check_counter& counter, bool passed, const std::string& what) {
        counter.performed++;
        if (!passed) {
            counter.failed++;
            ok = false;
            if (note.empty()) note = what;
        }
    }
};

void run_trial(const sequence& seq, const std::string& dump,
               std::uint64_t trial_seed, trial_context& ctx) {
    const fuzz_config& cfg = ctx.cfg;
    fuzz_summary& s = ctx.s;

    std::uint64_t derive = trial_seed;
    const std::uint64_t check_seed = splitmix64(derive);
    rng gen(splitmix64(derive));

    // full certification pass
    check_options copts;
    copts.eval = cfg.eval;
    copts.tol = cfg.tol;
    copts.seed = check_seed;
    copts.directions = cfg.directions;
    const check_report report = certify(seq, copts);
    ctx.check(s.concentration, report.concentration_ok, "concentration bound violated");
    ctx.check(s.mean_sets, report.mean_set_ok, "mean-set consistency violated");
    ctx.check(s.conditional, report.conditional_ok, "conditional bound violated");
    if (report.scalar_applicable) {
        s.scalar_trials++;
        ctx.check(s.scalar, report.scalar_ok, "scalar identity violated");
    }

    // shared geometry
    const path_space paths(seq, cfg.eval.limits.paths);
    std::vector<polytope> sets;
    for (const marginal& m : seq.marginals())
        sets.push_back(mean_set(m));
    const polytope theta = minkowski_average(sets, cfg.eval.limits.paths);

    // three path tables: the squared distance of the sample mean, two random
    numvec rho_sq(paths.path_count());
    for (std::size_t id = 0; id < paths.path_count(); id++) {
        const projection p = project(theta, path_mean(seq, paths, id));
        rho_sq[id] = p.distance * p.distance;
    }
    numvec random_a(paths.path_count()), random_b(paths.path_count());
    for (std::size_t id = 0; id < paths.path_count(); id++) {
        random_a[id] = gen.uniform(-2.0, 2.0);
        random_b[id] = gen.uniform(-2.0, 2.0);
    }

    // oracle equivalence: backward induction vs adapted-selection maximum
    const numvec* tables[3] = {&rho_sq, &random_a, &random_b};
    double via_induction[3];
    path_function fns[3] = {path_function::from_table(rho_sq),
                            path_function::from_table(random_a),
                            path_function::from_table(random_b)};
    for (int j = 0; j < 3; j++)
        via_induction[j] = product_expectation_table(seq, paths, *tables[j]);

    double via_selections[3] = {-1e300, -1e300, -1e300};
    bool mass_ok = true;
    std::size_t mass_checked = 0;
    adapted_selection_enumerator en(seq, cfg.eval);
    while (auto sel = en.next()) {
        for (int j = 0; j < 3; j++)
            via_selections[j] =
                std::max(via_selections[j], expectation_under(seq, *sel, fns[j], cfg.eval));
        if (mass_checked < kMassChecks) {
            mass_checked++;
            if (std::abs(selection_total_mass(seq, *sel, cfg.eval) - 1.0) > 1e-10)
                mass_ok = false;
        }
    }
    ctx.check(s.mass, mass_ok, "selection mass off unity");
    for (int j = 0; j < 3; j++) {
        const double rel = std::abs(via_induction[j] - via_selections[j]) /
                           scale_of(via_induction[j], via_selections[j]);
        s.worst_oracle_rel = std::max(s.worst_oracle_rel, rel);
        ctx.check(s.oracle, rel <= cfg.tol.oracle_rel,
                  "induction disagrees with selection oracle");
    }

    // sublinearity of the product evaluator
    {
        numvec sum(paths.path_count()), scaled(paths.path_count()),
            shifted(paths.path_count()), constant(paths.path_count());
        const double lambda = gen.uniform(0.0, 2.0);
        const double c = gen.uniform(-2.0, 2.0);
        for (std::size_t id = 0; id < paths.path_count(); id++) {
            sum[id] = random_a[id] + random_b[id];
            scaled[id] = lambda * random_a[id];
            shifted[id] = random_a[id] + std::abs(random_b[id]);
            constant[id] = c;
        }
        const double ea = via_induction[1], eb = via_induction[2];
        const double esum = product_expectation_table(seq, paths, sum);
        const double escaled = product_expectation_table(seq, paths, scaled);
        const double eshift = product_expectation_table(seq, paths, shifted);
        const double econst = product_expectation_table(seq, paths, constant);
        const bool sub_ok =
            esum <= ea + eb + 1e-10 * scale_of(ea, eb) &&
            std::abs(escaled - lambda * ea) <= 1e-10 * scale_of(ea) &&
            std::abs(econst - c) <= 1e-12 &&
            ea <= eshift + 1e-12;
        ctx.check(s.sublinear, sub_ok, "sublinearity property violated");
    }

    // serialization round trip
    ctx.check(s.roundtrip, sequences_equal(parse_scenario(dump).seq, seq),
              "serialization round trip changed the sequence");

    // minimax: the flag plus random feasible plans never beating the value
    {
        bool plans_ok = report.minimax_ok;
        numvec plan_cost(paths.path_count());
        for (std::size_t p = 0; p < cfg.plans && plans_ok; p++) {
            for (std::size_t id = 0; id < paths.path_count(); id++) {
                const numvec weights = gen.simplex(theta.vertex_count());
                numvec target(seq.dimension(), 0.0);
                for (std::size_t v = 0; v < weights.size(); v++)
                    for (std::size_t c = 0; c < target.size(); c++)
                        target[c] += weights[v] * theta.vertices()[v][c];
                plan_cost[id] = squared_distance(path_mean(seq, paths, id), target);
            }
            if (product_expectation_table(seq, paths, plan_cost) <
                report.mean_distance - kPlanSlack)
                plans_ok = false;
        }
        ctx.check(s.minimax, plans_ok, "minimax property violated");
    }

    // classical degeneration when every marginal has a single generator
    bool all_single = true;
    for (const marginal& m : seq.marginals())
        if (m.generator_count() != 1) all_single = false;
    if (all_single) {
        s.classical_trials++;
        double variance_sum = 0.0;
        for (const marginal& m : seq.marginals())
            variance_sum +=
                m.generator_second_moment(0) - squared_norm(m.generator_mean(0));
        const double expected = variance_sum / double(seq.size() * seq.size());
        ctx.check(s.classical,
                  std::abs(report.mean_distance - expected) <= cfg.tol.classical,
                  "single-generator case missed the classical variance value");
    }

    // Minkowski/support additivity on sampled directions
    {
        bool additive = true;
        for (std::size_t k = 0; k < cfg.directions; k++) {
            const numvec dir = gen.direction(seq.dimension());
            double averaged = 0.0;
            for (const polytope& p : sets)
                averaged += support_value(p, dir).value;
            averaged /= double(seq.size());
            if (std::abs(support_value(theta, dir).value - averaged) > kAdditivityTol) {
                additive = false;
                break;
            }
        }
        ctx.check(s.additivity, additive, "support additivity violated");
    }

    // projection contract on random query points
    {
        bool proj_ok = true;
        const double reach = 3.0 * cfg.support_half_width;
        for (int q = 0; q < 3; q++) {
            numvec x(seq.dimension());
            for (double& v : x)
                v = gen.uniform(-reach, reach);
            const projection pr = project(theta, x);
            s.worst_certificate = std::max(s.worst_certificate, pr.certificate);
            double weight_sum = 0.0, lowest = 0.0;
            numvec rebuilt(seq.dimension(), 0.0);
            for (std::size_t v = 0; v < pr.coefficients.size(); v++) {
                weight_sum += pr.coefficients[v];
                lowest = std::min(lowest, pr.coefficients[v]);
                for (std::size_t c = 0; c < rebuilt.size(); c++)
                    rebuilt[c] += pr.coefficients[v] * theta.vertices()[v][c];
            }
            const double dist_sq = pr.distance * pr.distance;
            const double direct_sq = squared_distance(x, pr.point);
            if (pr.certificate > kCertificateTol || std::abs(weight_sum - 1.0) > 1e-10 ||
                lowest < -1e-12 ||
                squared_distance(rebuilt, pr.point) > 1e-18 ||
                std::abs(dist_sq - direct_sq) > 1e-10 * scale_of(dist_sq))
                proj_ok = false;
            if (pr.distance <= membership_tol) {
                // membership implies no separating direction
                for (int k = 0; k < 5; k++) {
                    const numvec dir = gen.direction(seq.dimension());
                    if (dot(dir, x) > support_value(theta, dir).value + 1e-8)
                        proj_ok = false;
                }
            }
        }
        ctx.check(s.projection, proj_ok, "projection contract violated");
    }
}

} // namespace

sequence sample_sequence(std::uint64_t trial_seed, const fuzz_config& cfg) {
    rng gen(trial_seed);
    const std::size_t dim = 1 + gen.index(cfg.d_max);
    const std::size_t n = 1 + gen.index(cfg.n_max);
    const double w = cfg.support_half_width;
    std::vector<marginal> marginals;
    marginals.reserve(n);
    for (std::size_t i = 0; i < n; i++) {
        const std::size_t m = 1 + gen.index(cfg.m_max);
        const std::size_t k = 1 + gen.index(cfg.k_max);
        std::vector<numvec> support;
        support.reserve(m);
        std::size_t attempts = 0;
        while (support.size() < m) {
            if (++attempts > 1000)
                throw convergence_failure(
                    "support sampling kept colliding; widen the cube", 0.0);
            numvec x(dim);
            for (double& v : x)
                v = gen.uniform(-w, w);
            bool distinct = true;
            for (const numvec& other : support)
                if (squared_distance(other, x) < 1e-12) distinct = false;
            if (distinct) support.push_back(std::move(x));
        }
        std::vector<numvec> generators;
        generators.reserve(k);
        for (std::size_t g = 0; g < k; g++)
            generators.push_back(gen.simplex(m));
        marginals.emplace_back(std::move(support), std::move(generators));
    }
    return sequence(std::move(marginals));
}

fuzz_outcome fuzz(const fuzz_config& cfg) {
    fuzz_summary s;
    std::uint64_t master = cfg.seed;
    for (std::size_t t = 0; t < cfg.trials; t++) {
        const std::uint64_t trial_seed = splitmix64(master);
        trial_context ctx(cfg, s);
        std::string dump;
        try {
            const sequence seq = sample_sequence(trial_seed, cfg);
            dump = serialize_scenario(seq);
            run_trial(seq, dump, trial_seed, ctx);
        } catch (const std::exception& e) {
            ctx.ok = false;
            ctx.note = e.what();
            if (dump.empty()) dump = error_json("exception", e.what());
        }
        s.trials++;
        if (!ctx.ok) {
            s.failures++;
            s.failed_trials.push_back(t);
            s.counterexamples.push_back(dump);
            s.failure_notes.push_back(ctx.note);
        }
    }

    nlohmann::ordered_json j;
    j["campaign"] = {{"rng", rng_name},
                     {"seed", cfg.seed},
                     {"trials", cfg.trials},
                     {"ranges", {{"d_max", cfg.d_max},
                                 {"n_max", cfg.n_max},
                                 {"m_max", cfg.m_max},
                                 {"k_max", cfg.k_max}}},
                     {"support_half_width", cfg.support_half_width},
                     {"directions", cfg.directions},
                     {"plans", cfg.plans},
                     {"budget", {{"paths", cfg.eval.limits.paths},
                                 {"selections", cfg.eval.limits.selections}}},
                     {"tolerances", {{"identity", cfg.tol.identity},
                                     {"membership", cfg.tol.membership},
                                     {"inequality_slack", cfg.tol.inequality_slack},
                                     {"minimax", cfg.tol.minimax},
                                     {"conditional", cfg.tol.conditional},
                                     {"classical", cfg.tol.classical},
                                     {"oracle_rel", cfg.tol.oracle_rel}}}};
    auto counter_json = [](const check_counter& c) {
        return nlohmann::ordered_json{{"performed", c.performed}, {"failed", c.failed}};
    };
    j["checks"] = {{"oracle", counter_json(s.oracle)},
                   {"mass", counter_json(s.mass)},
                   {"sublinear", counter_json(s.sublinear)},
                   {"roundtrip", counter_json(s.roundtrip)},
                   {"concentration", counter_json(s.concentration)},
                   {"minimax", counter_json(s.minimax)},
                   {"mean_sets", counter_json(s.mean_sets)},
                   {"conditional", counter_json(s.conditional)},
                   {"scalar", counter_json(s.scalar)},
                   {"classical", counter_json(s.classical)},
                   {"additivity", counter_json(s.additivity)},
                   {"projection", counter_json(s.projection)}};
    j["coverage"] = {{"scalar_trials", s.scalar_trials},
                     {"classical_trials", s.classical_trials}};
    j["worst"] = {{"oracle_rel", s.worst_oracle_rel},
                  {"certificate", s.worst_certificate}};
    j["trials"] = s.trials;
    j["failures"] = s.failures;
    nlohmann::ordered_json failed = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.failed_trials.size(); i++)
        failed.push_back({{"trial", s.failed_trials[i]}, {"note", s.failure_notes[i]}});
    j["failed_trials"] = std::move(failed);

    return fuzz_outcome{std::move(s), detail::dump_document(j)};
}

} // namespace credal
