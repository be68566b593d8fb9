#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "credal/inequality_lab.hpp"
#include "credal/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace credal;
using fixtures::credal_coin;
using fixtures::fair_coin;
using fixtures::iid;

TEST_CASE("mean sets are hulls of the generator means") {
    const polytope coin = mean_set(credal_coin());
    REQUIRE(coin.vertex_count() == 2);
    CHECK(coin.vertices()[0][0] == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(coin.vertices()[1][0] == doctest::Approx(0.4).epsilon(1e-15));

    const polytope fair = mean_set(fair_coin());
    REQUIRE(fair.vertex_count() == 1);
    CHECK(std::abs(fair.vertices()[0][0]) <= 1e-15);

    // point masses at the triangle corners: the mean set is the triangle
    const polytope tri = mean_set(fixtures::corner_masses());
    CHECK(tri.vertex_count() == 3);
}

TEST_CASE("mean support agrees with the polytope support function") {
    const marginal tri = fixtures::corner_masses();
    const polytope hull = mean_set(tri);
    rng gen(5);
    for (int round = 0; round < 40; round++) {
        numvec p(2);
        for (double& c : p)
            c = gen.uniform(-1.0, 1.0);
        CHECK(std::abs(mean_support(tri, p) - support_value(hull, p).value) <= 1e-12);
    }
    CHECK(mean_support(credal_coin(), {1.0}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(mean_support(credal_coin(), {-1.0}) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("variance proxy on the credal coin") {
    const auto vp = variance_proxy(iid(credal_coin(), 2));
    REQUIRE(vp.per_index.size() == 2);
    // |X|^2 = 1 surely and 0 lies in the mean set, so the proxy is exactly 1
    CHECK(vp.per_index[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vp.value == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(vp.minimizers.size() == 2);
    CHECK(std::abs(vp.minimizers[0][0]) <= 1e-7);
}

TEST_CASE("variance proxy degenerates to the variance for one generator") {
    // fair coin: Var = 1; biased (0.9, 0.1) on {-1, 1}: Var = 1 - 0.64
    const auto fair = variance_proxy(iid(fair_coin(), 1));
    CHECK(fair.value == doctest::Approx(1.0).epsilon(1e-12));

    const marginal biased({{-1.0}, {1.0}}, {{0.9, 0.1}}, "biased");
    const auto vb = variance_proxy(iid(biased, 3));
    CHECK(vb.value == doctest::Approx(1.0 - 0.64).epsilon(1e-11));

    const marginal point({{2.0, -1.0}}, {{1.0}}, "pt");
    CHECK(variance_proxy(iid(point, 2)).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("variance proxy matches the independent oracle on random marginals") {
    rng gen(99);
    for (int round = 0; round < 30; round++) {
        const std::size_t dim = 1 + gen.index(3);
        const std::size_t m = 1 + gen.index(4);
        const std::size_t k = 1 + gen.index(5);
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
        const marginal mar(support, gens);

        const auto vp = variance_proxy(iid(mar, 1));
        const double expected = oracles::sigma_oracle(mar);
        CHECK(std::abs(vp.value - expected) <= 1e-9 * (1.0 + expected));
    }
}

TEST_CASE("sample-mean concentration on the credal coin") {
    CHECK(mean_distance_sq(iid(credal_coin(), 1)) ==
          doctest::Approx(0.36).epsilon(1e-13));
    CHECK(mean_distance_sq(iid(credal_coin(), 2)) ==
          doctest::Approx(0.252).epsilon(1e-13));

    // single generator: lhs = Var / n exactly on two fair coins
    CHECK(mean_distance_sq(iid(fair_coin(), 2)) ==
          doctest::Approx(0.5).epsilon(1e-13));

    for (std::size_t n = 1; n <= 6; n++) {
        const sequence seq = iid(credal_coin(), n);
        const double lhs = mean_distance_sq(seq);
        const double bound = variance_proxy(seq).value / double(n);
        CHECK(lhs <= bound + 1e-12 * (1.0 + bound));
    }
}

TEST_CASE("minimax form equals the direct distance") {
    for (std::size_t n = 1; n <= 4; n++) {
        const sequence seq = iid(credal_coin(), n);
        CHECK(std::abs(minimax_distance_sq(seq) - mean_distance_sq(seq)) <= 1e-9);
    }
    const sequence tri = iid(fixtures::corner_masses(), 2);
    CHECK(std::abs(minimax_distance_sq(tri) - mean_distance_sq(tri)) <= 1e-9);
}

TEST_CASE("scalar deviation identity in dimension one") {
    for (std::size_t n = 1; n <= 4; n++) {
        const sequence seq = iid(credal_coin(), n);
        CHECK(std::abs(scalar_deviation_sq(seq) - mean_distance_sq(seq)) <= 1e-12);
    }
    CHECK_THROWS_AS(scalar_deviation_sq(iid(fixtures::corner_masses(), 1)),
                    invalid_input);
}

TEST_CASE("certify produces a fully populated passing report") {
    const sequence seq = iid(credal_coin(), 2);
    check_options opts;
    opts.seed = 17;
    const check_report r = certify(seq, opts);

    CHECK(r.dimension == 1);
    CHECK(r.n == 2);
    CHECK(r.mean_distance == doctest::Approx(0.252).epsilon(1e-13));
    CHECK(r.bound == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.variance_proxy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.scalar_applicable);
    CHECK(r.seed == 17);
    CHECK(r.directions == 100);
    CHECK(r.rng_algorithm == rng_name);
    REQUIRE(r.marginal_mean_vertices.size() == 2);
    CHECK(r.marginal_mean_vertices[0].size() == 2);
    CHECK(r.mean_vertices.size() == 2);

    CHECK(r.concentration_ok);
    CHECK(r.minimax_ok);
    CHECK(r.mean_set_ok);
    CHECK(r.conditional_ok);
    CHECK(r.scalar_ok);
    CHECK(r.all_ok());

    CHECK(r.support_mismatch <= r.tolerances.identity);
    CHECK(r.membership_excess <= r.tolerances.membership);
    CHECK(r.conditional_excess <= r.tolerances.conditional);
}

TEST_CASE("report flags are recomputable from the recorded numbers") {
    const check_report r = certify(iid(credal_coin(), 2));
    check_report copy = r;
    copy.concentration_ok = copy.minimax_ok = copy.mean_set_ok = false;
    copy.conditional_ok = copy.scalar_ok = false;
    apply_flags(copy);
    CHECK(copy.concentration_ok == r.concentration_ok);
    CHECK(copy.minimax_ok == r.minimax_ok);
    CHECK(copy.mean_set_ok == r.mean_set_ok);
    CHECK(copy.conditional_ok == r.conditional_ok);
    CHECK(copy.scalar_ok == r.scalar_ok);

    // a doctored lhs flips exactly the flags that depend on it
    copy.mean_distance = copy.bound + 1.0;
    apply_flags(copy);
    CHECK(!copy.concentration_ok);
    CHECK(copy.mean_set_ok);
}

TEST_CASE("certify is deterministic for a fixed seed") {
    check_options opts;
    opts.seed = 4242;
    const check_report a = certify(iid(credal_coin(), 2), opts);
    const check_report b = certify(iid(credal_coin(), 2), opts);
    CHECK(a.support_mismatch == b.support_mismatch);
    CHECK(a.membership_excess == b.membership_excess);
    CHECK(a.conditional_excess == b.conditional_excess);
    CHECK(a.mean_distance == b.mean_distance);
}

TEST_CASE("certify on a two-dimensional mixed sequence") {
    const sequence seq({fixtures::corner_masses(), fixtures::corner_masses()});
    const check_report r = certify(seq);
    CHECK(r.dimension == 2);
    CHECK(!r.scalar_applicable);
    CHECK(r.scalar_ok); // vacuously
    CHECK(r.all_ok());
    CHECK(r.mean_distance <= r.bound + 1e-8 * (1.0 + r.bound));
}
