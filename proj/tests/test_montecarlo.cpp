#include "oracles.hpp"

#include "ssp/montecarlo.hpp"

#include <doctest.h>

#include <cmath>

using namespace ssp;

TEST_CASE("episodes on the two-state fixture") {
    const Mdp m = two_state_example(0.9);
    const Policy g = *two_state_policy("g");
    const Policy w = *two_state_policy("w");
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto e = simulate_episode(m, g, 0, 10000, RngStream{1, k});
        CHECK(e.total_cost == 0.0);
        CHECK_FALSE(e.truncated);
        const auto f = simulate_episode(m, w, 0, 10000, RngStream{1, k});
        CHECK(f.total_cost == static_cast<double>(f.steps));
        CHECK(f.steps >= 1);
    }
    const auto t = simulate_episode(two_state_example(1.0), w, 0, 100, RngStream{3, 3});
    CHECK(t.truncated);
    CHECK(t.steps == 100);
    CHECK(t.total_cost == 100.0);
}

TEST_CASE("episode determinism") {
    const Mdp m = random_ssp(4, 3, 12, true, 0.05);
    const Policy mu{{0, 1, 2, 0}};
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto a = simulate_episode(m, mu, 2, 1000, RngStream{8, k});
        const auto b = simulate_episode(m, mu, 2, 1000, RngStream{8, k});
        CHECK(a.total_cost == b.total_cost);
        CHECK(a.steps == b.steps);
        CHECK(a.truncated == b.truncated);
        if (!a.truncated) CHECK(a.steps < 1000);
    }
    const auto e1 = mc_policy_estimate(m, mu, 1, 500, 1000, RngStream{4, 0});
    const auto e2 = mc_policy_estimate(m, mu, 1, 500, 1000, RngStream{4, 0});
    CHECK(e1.mean == e2.mean);
    CHECK(e1.std_error == e2.std_error);
}

TEST_CASE("Monte Carlo estimates against exact values") {
    const Mdp m = two_state_example(0.9);
    const auto g = mc_policy_estimate(m, *two_state_policy("g"), 0, 1000, 10000, RngStream{1, 0});
    CHECK(g.mean == 0.0);
    CHECK(g.std_error == 0.0);

    const auto w = mc_policy_estimate(m, *two_state_policy("w"), 0, 20000, 10000, RngStream{2, 0});
    // Geometric(0.1) return: variance (1 - p)/p^2 = 90.
    CHECK(std::abs(w.mean - 10.0) <= 5.0 * w.std_error);
    CHECK(w.std_error == doctest::Approx(std::sqrt(90.0 / 20000)).epsilon(0.1));

    int within = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Mdp r = random_ssp(3, 2, seed, true, 0.1);
        const auto cert = contraction_certificate(r);
        const std::size_t cap = 60;
        const Policy mu = policy_from_index(seed % 8, 3, 2);
        const auto exact = oracle::linear_value(r, mu.choice);
        REQUIRE(exact);
        for (std::size_t s = 0; s < 3; ++s) {
            const auto est = mc_policy_estimate(r, mu, s, 4000, cap, RngStream{seed, s});
            const double bias = truncation_bias_bound(r, cert, s, cap);
            ++total;
            within += std::abs(est.mean - (*exact)[s]) <= 4.0 * est.std_error + bias;
        }
    }
    CHECK(within >= total - 1);
}

TEST_CASE("certificate-derived episode cap") {
    const Mdp m = two_state_example(0.9);
    const auto cert = contraction_certificate(m);
    const std::size_t cap = default_episode_cap(m, cert, 1e-6);
    CHECK(truncation_bias_bound(m, cert, 0, cap) <= 1e-6);
    CHECK(truncation_bias_bound(m, cert, 0, cap - 1) > 1e-6);
    CHECK(default_episode_cap(m, cert, 1e-3) < cap);
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s.add(1.0);
    for (int k = 0; k < 1000; ++k) s.add(1e-16);
    s.add(-1.0);
    CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
}
