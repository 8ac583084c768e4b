#include "oracles.hpp"

#include "ssp/dp.hpp"
#include "ssp/errors.hpp"
#include "ssp/rng.hpp"

#include <doctest.h>

using namespace ssp;

namespace {

const Mdp kTwo = two_state_example(0.9);

Policy named(const char* name) { return *two_state_policy(name); }

ValueVector random_vector(StreamEngine& rng, std::size_t n, double lo, double hi) {
    ValueVector v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool leq(const ValueVector& a, const ValueVector& b, double tol = 0.0) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + tol) return false;
    return true;
}

} // namespace

TEST_CASE("operator examples on the two-state fixture") {
    CHECK(apply_T_mu(kTwo, {0, 0}, named("w")) == ValueVector{1, 1});
    CHECK(apply_T_mu(kTwo, {0, 0}, named("g")) == ValueVector{0, 0});
    CHECK(oracle::max_abs_diff(apply_T_mu(kTwo, {10, 9}, named("l")), {10, 9}) <= 1e-12);

    CHECK(apply_T(kTwo, {0, 0}) == ValueVector{0, 0});
    CHECK(oracle::max_abs_diff(apply_T(kTwo, {2, 0}), {0, 1}) <= 1e-15);
    CHECK(oracle::max_abs_diff(apply_T(kTwo, {1, 1}), {0.9, 0.9}) <= 1e-15);

    CHECK(greedy(kTwo, {0, 0}) == named("g"));
    CHECK(greedy(kTwo, {2, 0}) == named("r"));
    CHECK(greedy(kTwo, {0, 2}) == named("l"));
}

TEST_CASE("greedy ties go to the first action") {
    const Mdp tie(1, {"a", "b"}, {0.5, 0.5}, {1.0, 1.0});
    CHECK(greedy(tie, {3.0}).choice == std::vector<std::size_t>{0});
    // d = J2 - J1 = 1/alpha exactly with alpha = 0.5: state 1 is tied.
    const Mdp half = two_state_example(0.5);
    CHECK(greedy(half, {0.0, 2.0}) == named("l"));
}

TEST_CASE("exact policy values match the closed forms") {
    for (double alpha : {0.5, 0.9, 0.99}) {
        const Mdp m = two_state_example(alpha);
        for (const char* name : {"l", "r", "g", "w"}) {
            const auto v = policy_value_exact(m, named(name));
            CHECK(oracle::max_abs_diff(v, oracle::two_state_value(name, alpha)) <= 1e-9);
            CHECK(oracle::max_abs_diff(apply_T_mu(m, v, named(name)), v) <= 1e-9);
        }
    }
    CHECK_THROWS_AS(policy_value_exact(two_state_example(1.0), named("w")), PropernessError);
    CHECK_THROWS_AS(policy_value_exact(loop_or_exit_example(), Policy{{1}}), PropernessError);
}

TEST_CASE("exact policy values agree with Gaussian elimination on random models") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Mdp m = random_ssp(1 + seed % 5, 1 + seed % 3, seed, true, 0.02);
        for (const auto& mu : enumerate_policies(m)) {
            const auto ref = oracle::linear_value(m, mu.choice);
            REQUIRE(ref);
            CHECK(oracle::max_abs_diff(policy_value_exact(m, mu), *ref) <= 1e-9);
        }
    }
}

TEST_CASE("value iteration and the brute-force oracle") {
    auto [J, mu] = optimal_value_vi(kTwo, 1e-10);
    CHECK(oracle::max_abs_diff(J, {0, 0}) <= 1e-9);
    CHECK(mu == named("g"));

    auto [Jb, mub] = brute_force_oracle(kTwo);
    CHECK(Jb == ValueVector{0, 0});
    CHECK(mub == named("g"));

    const Mdp zero(2, {"a", "b"}, {0.3, 0.2, 0.1, 0.1, 0.5, 0.0, 0.2, 0.2}, {0, 0, 0, 0});
    CHECK(max_norm(optimal_value_vi(zero, 1e-12).first) == 0.0);

    const Mdp single(1, {"only"}, {0.25}, {3.0});
    CHECK(brute_force_oracle(single).first[0] == doctest::Approx(4.0).epsilon(1e-12));

    const Mdp seven = random_ssp(3, 2, 7, true, 0.05);
    CHECK(oracle::max_abs_diff(optimal_value_vi(seven, 1e-10).first, brute_force_oracle(seven).first) <= 1e-6);

    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const Mdp m = random_ssp(1 + seed % 4, 1 + seed % 3, seed, true, 0.05);
        const auto vi = optimal_value_vi(m, 1e-11);
        CHECK(oracle::max_abs_diff(vi.first, oracle::optimum(m)) <= 1e-6);
        CHECK(max_norm(apply_T(m, vi.first)) >= 0.0);
        ValueVector resid = apply_T(m, vi.first);
        CHECK(oracle::max_abs_diff(resid, vi.first) <= 1e-11);
        CHECK(vi.second == greedy(m, vi.first));
    }
    CHECK_THROWS_AS(optimal_value_vi(random_ssp(3, 2, 1, true, 0.01), 1e-12, 3), ConvergenceError);
    CHECK_THROWS_AS(brute_force_oracle(two_state_example(1.0)), AssumptionError);
}

TEST_CASE("properness and assumption checks") {
    for (const auto& mu : enumerate_policies(kTwo)) CHECK(is_proper(kTwo, mu));
    CHECK_FALSE(is_proper(two_state_example(1.0), named("w")));
    CHECK(is_proper(two_state_example(1.0), named("g")) == false);
    CHECK(is_proper(Mdp(1, {"exit"}, {0.0}, {1.0}), Policy{{0}}));

    auto loop = check_assumptions(loop_or_exit_example());
    CHECK_FALSE(loop.all_proper);
    CHECK(loop.exists_proper);
    CHECK(loop.improper_infinite_cost);
    CHECK(loop.assumption3);

    CHECK(check_assumptions(kTwo).all_proper);
    auto undiscounted = check_assumptions(two_state_example(1.0));
    CHECK_FALSE(undiscounted.exists_proper);
    CHECK_FALSE(undiscounted.assumption3);

    // A zero-cost self loop is improper but not divergent.
    const Mdp free_loop(1, {"exit", "loop"}, {0.0, 1.0}, {1.0, 0.0});
    auto fl = check_assumptions(free_loop);
    CHECK(fl.exists_proper);
    CHECK_FALSE(fl.improper_infinite_cost);
    CHECK_FALSE(fl.assumption3);
    CHECK_THROWS_AS(brute_force_oracle(free_loop), AssumptionError);

    const Mdp negative(1, {"exit", "loop"}, {0.0, 1.0}, {1.0, -1.0});
    CHECK_THROWS_AS(check_assumptions(negative), UnsupportedError);

    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const Mdp m = random_ssp(3, 2, seed, false, 0.0);
        bool any_improper = false;
        for (const auto& mu : enumerate_policies(m)) {
            const bool proper = is_proper(m, mu);
            CHECK(proper == oracle::leaks(m, mu.choice));
            any_improper = any_improper || !proper;
        }
        CHECK(has_improper_policy(m) == any_improper);
        const auto rep = check_assumptions(m);
        CHECK(rep.all_proper == !any_improper);
        CHECK(rep.assumption3 == (rep.exists_proper && rep.improper_infinite_cost));
        if (rep.all_proper) CHECK(rep.exists_proper);
    }
}

TEST_CASE("contraction certificate") {
    const auto cert = contraction_certificate(kTwo);
    CHECK(oracle::max_abs_diff(cert.theta, {10, 10}) <= 1e-9);
    CHECK(cert.beta == doctest::Approx(0.9).epsilon(1e-10));

    const auto one = contraction_certificate(Mdp(1, {"exit"}, {0.0}, {1.0}));
    CHECK(one.theta[0] == doctest::Approx(1.0));
    CHECK(one.beta == doctest::Approx(0.0));

    CHECK_THROWS_AS(contraction_certificate(loop_or_exit_example()), AssumptionError);

    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const Mdp m = random_ssp(1 + seed % 4, 1 + seed % 3, seed, true, 0.05);
        const auto c = contraction_certificate(m);
        CHECK(certificate_holds(m, c));
        CHECK(c.beta < 1.0);
        CHECK(oracle::max_abs_diff(c.theta, oracle::worst_steps(m)) <= 1e-7);
        double beta = 0.0;
        for (double t : c.theta) beta = std::max(beta, (t - 1.0) / t);
        CHECK(c.beta == doctest::Approx(beta).epsilon(1e-9));
    }
    CHECK_FALSE(certificate_holds(kTwo, {{10, 10}, 0.5}));
}

TEST_CASE("norms and residuals") {
    CHECK(weighted_max_norm({10, 10}, {10, 10}) == 1.0);
    CHECK(weighted_max_norm({-5, 2}, {10, 10}) == 0.5);
    CHECK(weighted_max_norm({-3, 7, 1}, {1, 1, 1}) == max_norm({-3, 7, 1}));
    CHECK_THROWS(weighted_max_norm({1}, {0.0}));

    auto r = bellman_residual(kTwo, {2, 0});
    CHECK(oracle::max_abs_diff(r.c, {-2, 1}) <= 1e-15);
    CHECK(r.lambda == ValueVector{0, r.c[1]});
    auto z = bellman_residual(kTwo, {0, 0});
    CHECK(z.c == ValueVector{0, 0});
    CHECK(z.lambda == ValueVector{0, 0});
    auto s = bellman_residual(kTwo, {1, 1});
    CHECK(oracle::max_abs_diff(s.c, {-0.1, -0.1}) <= 1e-15);
    CHECK(s.lambda == ValueVector{0, 0});

    StreamEngine rng(RngStream{5, 1});
    for (int k = 0; k < 200; ++k) {
        const Mdp m = random_ssp(3, 2, k, true, 0.05);
        const auto J = random_vector(rng, 3, -10, 10);
        const auto res = bellman_residual(m, J);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(res.lambda[i] >= 0.0);
            CHECK(res.lambda[i] >= res.c[i]);
            CHECK(res.lambda[i] == std::max(res.c[i], 0.0));
        }
    }
}

TEST_CASE("H_eps fixed point") {
    const auto cert = contraction_certificate(kTwo);
    const auto z = h_eps_fixed_point(kTwo, 0.01, cert, 1e-13);
    CHECK(oracle::max_abs_diff(z, {1, 1}) <= 1e-9);
    CHECK(oracle::max_abs_diff(h_eps_fixed_point(kTwo, 0.0, cert, 1e-13), {0, 0}) <= 1e-9);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Mdp m = random_ssp(3, 2, seed, true, 0.05);
        const auto c = contraction_certificate(m);
        const auto jstar = oracle::optimum(m);
        for (double eps : {0.1, 0.01}) {
            const auto zz = h_eps_fixed_point(m, eps, c, 1e-12);
            for (std::size_t i = 0; i < 3; ++i) {
                const double band = eps / (1.0 - c.beta) * c.theta[i];
                CHECK(zz[i] >= jstar[i] - band - 1e-9);
                CHECK(zz[i] <= jstar[i] + band + 1e-9);
            }
        }
    }
}

TEST_CASE("monotonicity, contraction and greedy consistency on random instances") {
    StreamEngine rng(RngStream{17, 3});
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 1 + k % 4;
        const Mdp m = random_ssp(n, 1 + k % 3, 1000 + k, true, 0.05);
        const auto cert = contraction_certificate(m);
        const auto J1 = random_vector(rng, n, -20, 20);
        ValueVector J2 = J1;
        for (auto& x : J2) x += rng.uniform(0, 5);
        const auto mu = policy_from_index(rng() % policy_count(m), n, m.num_actions());

        CHECK(leq(apply_T(m, J1), apply_T(m, J2)));
        CHECK(leq(apply_T_mu(m, J1, mu), apply_T_mu(m, J2, mu)));

        const auto J3 = random_vector(rng, n, -20, 20);
        ValueVector dT(n), dTmu(n), d(n);
        const auto a = apply_T(m, J1), b = apply_T(m, J3);
        const auto am = apply_T_mu(m, J1, mu), bm = apply_T_mu(m, J3, mu);
        for (std::size_t i = 0; i < n; ++i) {
            dT[i] = a[i] - b[i];
            dTmu[i] = am[i] - bm[i];
            d[i] = J1[i] - J3[i];
        }
        const double rhs = cert.beta * weighted_max_norm(d, cert.theta);
        CHECK(weighted_max_norm(dT, cert.theta) <= rhs + 1e-9);
        CHECK(weighted_max_norm(dTmu, cert.theta) <= rhs + 1e-9);

        const auto g = greedy(m, J1);
        CHECK(apply_T_mu(m, J1, g) == apply_T(m, J1));
        const auto [tj, g2] = bellman_backup(m, J1);
        CHECK(tj == apply_T(m, J1));
        CHECK(g2 == g);

        const auto jstar = oracle::optimum(m);
        CHECK(leq(jstar, policy_value_exact(m, mu), 1e-9));
    }
}

TEST_CASE("two-state greedy regions") {
    StreamEngine rng(RngStream{2, 2});
    for (int k = 0; k < 5000; ++k) {
        const ValueVector J = random_vector(rng, 2, -20, 20);
        const auto name = two_state_policy_name(kTwo, greedy(kTwo, J));
        REQUIRE(name);
        CHECK(*name == oracle::two_state_region(J, 0.9));
    }
}
