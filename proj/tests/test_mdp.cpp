#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmdp/mdp.hpp"
#include "pmdp/oracles.hpp"
#include "test_util.hpp"

using namespace pmdp;

TEST_CASE("forward_rollout keeps a Dirac absorbed in a self loop") {
    SpaceDims dims{1, 2, 4};
    const TransitionKernel kernel = testutil::self_loop_kernel(dims);
    const Policy uniform = Policy::uniform(dims);
    Dist init = Dist::Zero(2);
    init[0] = 1.0; // (x0, a0)

    const OccupancyMeasure mu = forward_rollout(uniform, init, kernel);
    for (int n = 1; n <= 4; ++n) {
        CHECK(mu.slice[n][0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(mu.slice[n][1] == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("forward_rollout alternates marginals under the swap kernel") {
    SpaceDims dims{2, 1, 2};
    const TransitionKernel kernel = testutil::swap_kernel(1, 2);
    const Policy policy = Policy::uniform(dims);
    Dist init(2);
    init << 0.3, 0.7;

    const OccupancyMeasure mu = forward_rollout(policy, init, kernel);
    CHECK(mu.slice[1][0] == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(mu.slice[1][1] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(mu.slice[2][0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(mu.slice[2][1] == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("forward_rollout matches Monte Carlo visit frequencies") {
    SpaceDims dims{3, 2, 3};
    RngStream rng(42);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const Dist init = testutil::random_distribution(dims, rng);

    const OccupancyMeasure mu = forward_rollout(policy, init, kernel);
    const int samples = 1000000;
    RngStream sample_rng(7);
    const auto freq = oracle::mc_visit_frequencies(policy, kernel, init, samples, sample_rng);

    for (int n = 0; n <= dims.horizon; ++n)
        for (int i = 0; i < dims.pairs(); ++i) {
            const double p = mu.slice[n][i];
            const double se = std::sqrt(p * (1.0 - p) / samples);
            CHECK(std::abs(freq[n][i] - p) <= 3.0 * se + 1e-9);
        }
}

TEST_CASE("episode_transition_matrix is the swap permutation for N=1") {
    const TransitionKernel kernel = testutil::swap_kernel(1, 1);
    SpaceDims dims{2, 1, 1};
    const MatrixXd P = episode_transition_matrix(Policy::uniform(dims), kernel);
    CHECK(P(0, 1) == doctest::Approx(1.0));
    CHECK(P(1, 0) == doctest::Approx(1.0));
    CHECK(P(0, 0) == doctest::Approx(0.0));
    CHECK(P(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("episode_transition_matrix rows are stochastic and match rollout") {
    SpaceDims dims{4, 3, 5};
    RngStream rng(11);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const MatrixXd P = episode_transition_matrix(policy, kernel);

    for (int r = 0; r < P.rows(); ++r) CHECK(std::abs(P.row(r).sum() - 1.0) <= 1e-12);

    const Dist nu = testutil::random_distribution(dims, rng);
    const Dist via_matrix = P.transpose() * nu;
    const Dist via_rollout = forward_rollout(policy, nu, kernel).terminal();
    CHECK(l1_distance(via_matrix, via_rollout) <= 1e-12);
}

TEST_CASE("policy_from_occupancy inverts forward_rollout on the support") {
    SpaceDims dims{3, 2, 4};
    RngStream rng(3);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const Dist init = testutil::random_distribution(dims, rng);

    const OccupancyMeasure mu = forward_rollout(policy, init, kernel);
    const Policy back = policy_from_occupancy(mu, dims.num_actions);
    for (int n = 0; n < dims.horizon; ++n)
        for (int x = 0; x < dims.num_states; ++x) {
            const double state_mass =
                mu.slice[n + 1].segment(x * dims.num_actions, dims.num_actions).sum();
            if (state_mass <= kZeroMassFloor) continue;
            for (int a = 0; a < dims.num_actions; ++a)
                CHECK(std::abs(back.step[n](x, a) - policy.step[n](x, a)) <= 1e-12);
        }
}

TEST_CASE("policy_from_occupancy gives uniform rows to unreachable states") {
    SpaceDims dims{2, 2, 1};
    const TransitionKernel kernel = testutil::self_loop_kernel(dims);
    Dist init = Dist::Zero(4);
    init[0] = 1.0; // state 1 never reached
    const OccupancyMeasure mu = forward_rollout(Policy::uniform(dims), init, kernel);
    const Policy back = policy_from_occupancy(mu, 2);
    CHECK(back.step[0](1, 0) == doctest::Approx(0.5));
    CHECK(back.step[0](1, 1) == doctest::Approx(0.5));
}

TEST_CASE("policy_from_occupancy agrees with exhaustive trajectory enumeration") {
    SpaceDims dims{2, 2, 2};
    RngStream rng(19);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const Dist init = testutil::random_distribution(dims, rng);

    const OccupancyMeasure mu = oracle::enumerate_occupancy(policy, init, kernel);
    const Policy back = policy_from_occupancy(mu, 2);
    for (int n = 0; n < 2; ++n)
        for (int x = 0; x < 2; ++x)
            for (int a = 0; a < 2; ++a)
                CHECK(back.step[n](x, a) == doctest::Approx(policy.step[n](x, a)).epsilon(1e-10));
}

TEST_CASE("bellman_flow_residual is zero on rollouts and sees perturbations") {
    SpaceDims dims{3, 2, 4};
    RngStream rng(5);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const Dist init = testutil::random_distribution(dims, rng);

    OccupancyMeasure mu = forward_rollout(policy, init, kernel);
    CHECK(bellman_flow_residual(mu, kernel, init) <= 1e-12);

    SUBCASE("moving 0.1 mass in the terminal slice shows up as 0.1") {
        // Move between actions of two different states so exactly one flow
        // constraint per state breaks by 0.1.
        mu.slice[4][dims.pair_index(0, 0)] += 0.1;
        mu.slice[4][dims.pair_index(1, 0)] -= 0.1;
        CHECK(bellman_flow_residual(mu, kernel, init) == doctest::Approx(0.1).epsilon(1e-12));
    }

    SUBCASE("an initial slice mismatch reports its L1 size") {
        Dist other = init;
        other[0] += 0.2;
        other[1] -= 0.2;
        CHECK(bellman_flow_residual(mu, kernel, other) == doctest::Approx(0.4).epsilon(1e-12));
    }
}

TEST_CASE("sample_trajectory is deterministic where the MDP is") {
    SpaceDims dims{2, 1, 3};
    const TransitionKernel kernel = testutil::swap_kernel(1, 3);
    const Policy policy = Policy::uniform(dims);

    RngStream a(1), b(999);
    const Trajectory t1 = sample_trajectory(policy, kernel, {0, 0}, a);
    const Trajectory t2 = sample_trajectory(policy, kernel, {0, 0}, b);
    REQUIRE(t1.step.size() == 4);
    CHECK(t1.step == t2.step);
    CHECK(t1.step[1].x == 1);
    CHECK(t1.step[2].x == 0);
    CHECK(t1.step[3].x == 1);
}

TEST_CASE("sample_trajectory repeats under the same seed") {
    SpaceDims dims{3, 2, 5};
    RngStream rng(23);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);

    RngStream s1(77), s2(77);
    const Trajectory t1 = sample_trajectory(policy, kernel, {1, 0}, s1);
    const Trajectory t2 = sample_trajectory(policy, kernel, {1, 0}, s2);
    CHECK(t1.step == t2.step);
}

TEST_CASE("rollouts stay flow consistent across 1000 random instances") {
    RngStream rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        SpaceDims dims;
        dims.num_states = 2 + static_cast<int>(rng.raw() % 4);
        dims.num_actions = 1 + static_cast<int>(rng.raw() % 3);
        dims.horizon = 1 + static_cast<int>(rng.raw() % 6);
        const TransitionKernel kernel = testutil::random_kernel(dims, rng);
        const Policy policy = testutil::random_policy(dims, rng);
        const Dist init = testutil::random_distribution(dims, rng);
        const OccupancyMeasure mu = forward_rollout(policy, init, kernel);
        REQUIRE(bellman_flow_residual(mu, kernel, init) <= 1e-10);
    }
}

TEST_CASE("normalization survives a horizon of 200") {
    SpaceDims dims{5, 3, 200};
    RngStream rng(8);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const Dist init = testutil::random_distribution(dims, rng);
    const OccupancyMeasure mu = forward_rollout(policy, init, kernel);
    for (const Dist& slice : mu.slice) {
        CHECK(std::abs(slice.sum() - 1.0) <= 1e-10);
        CHECK(slice.minCoeff() >= -1e-15);
    }
}
