#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "credal/credal_core.hpp"
#include "credal/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace credal;
using fixtures::credal_coin;
using fixtures::fair_coin;
using fixtures::iid;

TEST_CASE("marginal validation names the offending field") {
    CHECK_THROWS_WITH_AS(marginal({{-1.0}, {1.0}}, {{0.7, 0.29}}, ""),
                         doctest::Contains("generator 0"), invalid_input);
    CHECK_THROWS_WITH_AS(marginal({{-1.0}, {1.0}}, {{0.5, 0.5}, {1.2, -0.2}}, ""),
                         doctest::Contains("generator 1"), invalid_input);
    CHECK_THROWS_AS(marginal({{1.0}, {1.0}}, {{0.5, 0.5}}, ""), invalid_input);
    CHECK_THROWS_AS(marginal({}, {{1.0}}, ""), invalid_input);
    CHECK_THROWS_AS(marginal({{1.0}}, {}, ""), invalid_input);
    CHECK_THROWS_AS(marginal({{1.0}, {2.0, 3.0}}, {{0.5, 0.5}}, ""), invalid_input);
    CHECK_THROWS_AS(marginal({{-1.0}, {1.0}}, {{1.0}}, ""), invalid_input);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(marginal({{inf}, {1.0}}, {{0.5, 0.5}}, ""), invalid_input);
}

TEST_CASE("generator moments") {
    const marginal m = credal_coin();
    CHECK(m.generator_mean(0)[0] == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(m.generator_mean(1)[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.generator_second_moment(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.generator_second_moment(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sequence requires a common dimension") {
    CHECK_THROWS_AS(sequence({credal_coin(), fixtures::corner_masses()}),
                    invalid_input);
    CHECK(iid(credal_coin(), 3).path_count() == 8.0);
}

TEST_CASE("path space ids are a row-major bijection") {
    const marginal three = marginal({{0.0}, {1.0}, {2.0}},
                                    {{0.2, 0.3, 0.5}, {1.0, 0.0, 0.0}}, "three");
    const sequence ok({credal_coin(), three, credal_coin()});
    const path_space paths(ok, 1e6);
    CHECK(paths.path_count() == 12);
    CHECK(paths.prefix_count(0) == 1);
    CHECK(paths.prefix_count(1) == 2);
    CHECK(paths.prefix_count(2) == 6);
    for (std::size_t id = 0; id < paths.path_count(); id++) {
        const indexvec idx = paths.decode(id);
        CHECK(paths.prefix_id(idx, idx.size()) == id);
    }
}

TEST_CASE("path budget violations name the count") {
    CHECK_THROWS_WITH_AS(path_space(iid(credal_coin(), 4), 10.0),
                         doctest::Contains("16"), budget_exceeded);
    try {
        path_space(iid(credal_coin(), 4), 10.0);
    } catch (const budget_exceeded& e) {
        CHECK(e.requested == 16.0);
        CHECK(e.allowed == 10.0);
    }
}

TEST_CASE("upper expectation on the credal coin") {
    const marginal m = credal_coin();
    const auto identity = upper_expectation(m, numvec{-1.0, 1.0});
    CHECK(identity.value == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(identity.generator == 1);

    const auto negated = upper_expectation(m, numvec{1.0, -1.0});
    CHECK(negated.value == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(negated.generator == 0);

    CHECK(upper_expectation(fair_coin(), numvec{-1.0, 1.0}).value == 0.0);

    const auto constant = upper_expectation(m, numvec{2.5, 2.5});
    CHECK(constant.value == doctest::Approx(2.5).epsilon(1e-15));

    CHECK_THROWS_AS(upper_expectation(m, numvec{1.0}), invalid_input);
    CHECK_THROWS_AS(upper_expectation(m, numvec{1.0, std::nan("")}), invalid_input);
}

TEST_CASE("upper expectation breaks ties toward the lowest generator") {
    const marginal m({{-1.0}, {1.0}}, {{0.5, 0.5}, {0.5, 0.5}}, "");
    CHECK(upper_expectation(m, numvec{3.0, -1.0}).generator == 0);
}

TEST_CASE("product expectation matches hand-computed values") {
    const sequence seq = iid(credal_coin(), 2);
    const auto sum = path_function::from_points([](std::span<const numvec> xs) {
        return xs[0][0] + xs[1][0];
    });
    CHECK(product_expectation(seq, sum) == doctest::Approx(0.8).epsilon(1e-14));

    const auto prod = path_function::from_points([](std::span<const numvec> xs) {
        return xs[0][0] * xs[1][0];
    });
    CHECK(product_expectation(seq, prod) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("product expectation reduces to the marginal case at n=1") {
    const sequence seq = iid(credal_coin(), 1);
    const auto f = path_function::from_points(
        [](std::span<const numvec> xs) { return 3.0 * xs[0][0] - 1.0; });
    const double direct =
        upper_expectation(credal_coin(), [](const numvec& x) {
            return 3.0 * x[0] - 1.0;
        }).value;
    CHECK(product_expectation(seq, f) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("product expectation enforces the path budget") {
    eval_options opts;
    opts.limits.paths = 4.0;
    const auto f = path_function::from_indices(
        [](std::span<const std::size_t>) { return 1.0; });
    CHECK_THROWS_AS(product_expectation(iid(credal_coin(), 3), f, opts),
                    budget_exceeded);
}

TEST_CASE("tabulation rejects wrong sizes and non-finite values") {
    const sequence seq = iid(credal_coin(), 2);
    const path_space paths(seq, 1e6);
    CHECK_THROWS_AS(path_function::from_table({1.0, 2.0}).tabulate(seq, paths),
                    invalid_input);
    CHECK_THROWS_AS(
        path_function::from_points([](std::span<const numvec> xs) {
            return xs[0][0] > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        }).tabulate(seq, paths),
        invalid_input);
}

TEST_CASE("selection enumeration is exhaustive and distinct") {
    const sequence seq = iid(credal_coin(), 2);
    adapted_selection_enumerator en(seq);
    CHECK(en.count() == 8.0);
    std::set<std::vector<indexvec>> seen;
    while (auto sel = en.next())
        seen.insert(sel->choice);
    CHECK(seen.size() == 8);

    adapted_selection_enumerator single(iid(fair_coin(), 3));
    CHECK(single.count() == 1.0);

    adapted_selection_enumerator base(iid(credal_coin(), 1));
    CHECK(base.count() == 2.0);
}

TEST_CASE("selection enumeration enforces its budget") {
    eval_options opts;
    opts.limits.selections = 7.0;
    CHECK_THROWS_AS(adapted_selection_enumerator(iid(credal_coin(), 2), opts),
                    budget_exceeded);
}

TEST_CASE("expectation under an adapted selection") {
    const sequence seq = iid(credal_coin(), 2);
    // squared distance of the sample mean to [-0.4, 0.4]
    const numvec table{0.36, 0.0, 0.0, 0.36};
    const auto f = path_function::from_table(table);

    // root picks (0.7, 0.3); the node after +1 picks (0.3, 0.7)
    const adapted_selection best{{{0}, {0, 1}}};
    CHECK(expectation_under(seq, best, f) == doctest::Approx(0.252).epsilon(1e-14));
    CHECK(selection_total_mass(seq, best) == doctest::Approx(1.0).epsilon(1e-14));

    // the homogeneous selections do worse
    const adapted_selection mirror{{{1}, {1, 1}}};
    CHECK(expectation_under(seq, mirror, f) ==
          doctest::Approx(0.2088).epsilon(1e-13));

    const auto one =
        path_function::from_indices([](std::span<const std::size_t>) { return 1.0; });
    adapted_selection_enumerator en(seq);
    double best_value = -1.0;
    while (auto sel = en.next()) {
        CHECK(expectation_under(seq, *sel, one) == doctest::Approx(1.0).epsilon(1e-13));
        best_value = std::max(best_value, expectation_under(seq, *sel, f));
    }
    CHECK(best_value == doctest::Approx(0.252).epsilon(1e-14));
    CHECK(best_value ==
          doctest::Approx(product_expectation(seq, f)).epsilon(1e-13));
}

TEST_CASE("single-generator selections reproduce the classical product") {
    const sequence seq = iid(fair_coin(), 2);
    adapted_selection_enumerator en(seq);
    const auto sel = en.next();
    REQUIRE(sel.has_value());
    const auto prod = path_function::from_points(
        [](std::span<const numvec> xs) { return xs[0][0] * xs[1][0]; });
    // independent fair coins: E[X1 X2] = 0
    CHECK(expectation_under(seq, *sel, prod) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(!en.next().has_value());
}

TEST_CASE("conditional means come from the selected generator") {
    const sequence seq = iid(credal_coin(), 2);
    const adapted_selection sel{{{0}, {0, 1}}};
    const indexvec prefix{1, 0};
    CHECK(conditional_mean(seq, sel, 0, prefix)[0] ==
          doctest::Approx(-0.4).epsilon(1e-15));
    // after observing +1 the selection switches to (0.3, 0.7)
    CHECK(conditional_mean(seq, sel, 1, prefix)[0] ==
          doctest::Approx(0.4).epsilon(1e-15));

    const marginal point({{2.5}}, {{1.0}}, "point");
    const sequence pt = iid(point, 1);
    const adapted_selection psel{{{0}}};
    CHECK(conditional_mean(pt, psel, 0, indexvec{0})[0] == 2.5);

    CHECK_THROWS_AS(conditional_mean(seq, sel, 2, prefix), index_error);
    CHECK_THROWS_AS(conditional_mean(seq, sel, 1, indexvec{7, 0}), index_error);
}

TEST_CASE("backward induction agrees with both oracles on random scenarios") {
    rng gen(2024);
    for (int round = 0; round < 20; round++) {
        const std::size_t n = 1 + gen.index(3);
        const std::size_t dim = 1 + gen.index(2);
        std::vector<marginal> ms;
        for (std::size_t i = 0; i < n; i++) {
            const std::size_t m = 1 + gen.index(3);
            const std::size_t k = 1 + gen.index(3);
            std::vector<numvec> support;
            while (support.size() < m) {
                numvec x(dim);
                for (double& v : x)
                    v = gen.uniform(-2.0, 2.0);
                bool fresh = true;
                for (const numvec& o : support)
                    if (squared_distance(o, x) < 1e-10) fresh = false;
                if (fresh) support.push_back(x);
            }
            std::vector<numvec> gens;
            for (std::size_t g = 0; g < k; g++)
                gens.push_back(gen.simplex(m));
            ms.emplace_back(std::move(support), std::move(gens));
        }
        const sequence seq(std::move(ms));
        const path_space paths(seq, 1e6);
        numvec table(paths.path_count());
        for (double& v : table)
            v = gen.uniform(-3.0, 3.0);

        const double via_fold = product_expectation_table(seq, paths, table);
        CHECK(via_fold ==
              doctest::Approx(oracles::recursive_product(seq, table)).epsilon(1e-12));

        double via_selections = -std::numeric_limits<double>::infinity();
        adapted_selection_enumerator en(seq);
        while (auto sel = en.next())
            via_selections = std::max(
                via_selections, oracles::selection_expectation(seq, paths, *sel, table));
        CHECK(via_fold == doctest::Approx(via_selections).epsilon(1e-10));
    }
}

TEST_CASE("product evaluator is sublinear in the path function") {
    rng gen(7);
    const sequence seq = iid(credal_coin(), 3);
    const path_space paths(seq, 1e6);
    for (int round = 0; round < 10; round++) {
        numvec f(paths.path_count()), g(paths.path_count()), sum(paths.path_count());
        for (std::size_t i = 0; i < f.size(); i++) {
            f[i] = gen.uniform(-2.0, 2.0);
            g[i] = gen.uniform(-2.0, 2.0);
            sum[i] = f[i] + g[i];
        }
        const double ef = product_expectation_table(seq, paths, f);
        const double eg = product_expectation_table(seq, paths, g);
        CHECK(product_expectation_table(seq, paths, sum) <= ef + eg + 1e-12);

        const double lambda = gen.uniform(0.0, 3.0);
        numvec scaled(f);
        for (double& v : scaled)
            v *= lambda;
        CHECK(product_expectation_table(seq, paths, scaled) ==
              doctest::Approx(lambda * ef).epsilon(1e-12));
    }
}
