#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmdp/gridworld.hpp"
#include "pmdp/objectives.hpp"
#include "pmdp/oracles.hpp"
#include "test_util.hpp"

using namespace pmdp;

TEST_CASE("map parser recognizes every cell kind") {
    const GridSpec spec = parse_map("S.#\n.DC\nT..\n");
    CHECK(spec.width == 3);
    CHECK(spec.height == 3);
    CHECK(spec.start_cell == 0);
    CHECK(spec.is_wall(2));
    CHECK(spec.door_cells == std::vector<int>{4});
    CHECK(spec.constraint_cells == std::vector<int>{5});
    CHECK(spec.target_cells == std::vector<int>{6});
}

TEST_CASE("map parser rejects malformed input") {
    CHECK_THROWS_AS((void)parse_map(""), ConfigError);
    CHECK_THROWS_AS((void)parse_map("S..\n..\n"), ConfigError);   // ragged
    CHECK_THROWS_AS((void)parse_map("...\n...\n"), ConfigError);  // no start
    CHECK_THROWS_AS((void)parse_map("S.X\n...\n"), ConfigError);  // unknown char
    CHECK_THROWS_AS((void)parse_map("SS.\n...\n"), ConfigError);  // two starts
}

TEST_CASE("noise free moves are deterministic and walls block") {
    GridSpec spec = parse_map("S.\n#.\n");
    spec.noise = 0.0;
    const Environment env = four_room_kernel(spec, 1);

    // right from the start cell reaches cell 1
    const int from_start_right = env.dims.pair_index(0, kActionRight);
    CHECK(env.kernel.step[0](from_start_right, 1) == doctest::Approx(1.0));

    // down from the start cell is blocked by the wall at cell 2
    const int from_start_down = env.dims.pair_index(0, kActionDown);
    CHECK(env.kernel.step[0](from_start_down, 0) == doctest::Approx(1.0));
}

TEST_CASE("rho is a dirac at the start cell with the stay action") {
    GridSpec spec = parse_map(two_room_7_map());
    const Environment env = four_room_kernel(spec, 3);
    CHECK(env.rho.sum() == doctest::Approx(1.0));
    CHECK(env.rho[env.dims.pair_index(spec.start_cell, kActionStay)] == doctest::Approx(1.0));
}

TEST_CASE("eleven by eleven default passes the exhaustive row audit") {
    GridSpec spec = parse_map(four_room_11_map());
    spec.noise = 0.1;
    const Environment env = four_room_kernel(spec, 2);
    CHECK(env.dims.num_states == 121);
    CHECK(env.dims.num_actions == 5);

    for (int x = 0; x < env.dims.num_states; ++x)
        for (int a = 0; a < env.dims.num_actions; ++a) {
            const auto row = env.kernel.step[0].row(env.dims.pair_index(x, a));
            REQUIRE(std::abs(row.sum() - 1.0) <= 1e-12);
            if (spec.is_wall(x)) continue;
            for (int y = 0; y < env.dims.num_states; ++y)
                if (spec.is_wall(y)) REQUIRE(row[y] == 0.0);
        }
}

TEST_CASE("entropy objective hits the closed-form values") {
    SpaceDims dims{2, 2, 1};
    const ObjectiveSpec objective = entropy_objective(dims);

    const Dist uniform = Dist::Constant(4, 0.25);
    CHECK(objective.value(1, 1, uniform) == doctest::Approx(-std::log(4.0)).epsilon(1e-12));

    Dist dirac = Dist::Zero(4);
    dirac[1] = 1.0;
    const double floor_slack = 4 * objective.floor * std::abs(std::log(objective.floor));
    CHECK(std::abs(objective.value(1, 1, dirac)) <= floor_slack);
}

TEST_CASE("entropy objective is permutation invariant") {
    SpaceDims dims{3, 2, 1};
    const ObjectiveSpec objective = entropy_objective(dims);
    RngStream rng(4);
    const Dist mu = testutil::random_distribution(dims, rng);
    Dist shuffled = mu.reverse();
    CHECK(objective.value(1, 1, mu) ==
          doctest::Approx(objective.value(1, 1, shuffled)).epsilon(1e-12));
}

TEST_CASE("obstacle objective evaluates the indicator cases") {
    SpaceDims dims{3, 2, 1};
    const ObjectiveSpec objective = obstacle_objective(dims, {0}, {2});

    Dist on_target = Dist::Zero(6);
    on_target[dims.pair_index(0, 1)] = 1.0;
    CHECK(objective.value(1, 1, on_target) == doctest::Approx(-1.0));

    Dist on_constraint = Dist::Zero(6);
    on_constraint[dims.pair_index(2, 0)] = 1.0;
    CHECK(objective.value(1, 1, on_constraint) == doctest::Approx(1.0));

    CHECK(objective.lipschitz == doctest::Approx(1.0 + 2.0 * 2.0));
    CHECK_THROWS_AS((void)obstacle_objective(dims, {1}, {1}), ConfigError);
}

TEST_CASE("gradients match central finite differences") {
    SpaceDims dims{3, 2, 1};
    RngStream rng(17);
    const ObjectiveSpec entropy = entropy_objective(dims);
    const ObjectiveSpec obstacles = obstacle_objective(dims, {0}, {1, 2});

    for (const ObjectiveSpec* objective : {&entropy, &obstacles}) {
        for (int probe = 0; probe < 30; ++probe) {
            Dist mu(dims.pairs());
            for (int i = 0; i < mu.size(); ++i) mu[i] = 0.5 + rng.uniform01();
            mu /= mu.sum();
            const Dist grad = objective->gradient(1, 1, mu);
            const Dist fd = oracle::finite_difference_gradient(
                [&](const Dist& d) { return objective->value(1, 1, d); }, mu);
            for (int i = 0; i < mu.size(); ++i)
                REQUIRE(std::abs(grad[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(grad[i])));
        }
    }
}

TEST_CASE("objectives are convex along random segments") {
    SpaceDims dims{4, 3, 1};
    RngStream rng(23);
    const ObjectiveSpec entropy = entropy_objective(dims);
    const ObjectiveSpec obstacles = obstacle_objective(dims, {0}, {3});

    for (const ObjectiveSpec* objective : {&entropy, &obstacles}) {
        for (int probe = 0; probe < 100; ++probe) {
            const Dist a = testutil::random_distribution(dims, rng);
            const Dist b = testutil::random_distribution(dims, rng);
            const double w = rng.uniform01();
            const Dist mid = w * a + (1.0 - w) * b;
            const double lhs = objective->value(1, 1, mid);
            const double rhs =
                w * objective->value(1, 1, a) + (1.0 - w) * objective->value(1, 1, b);
            REQUIRE(lhs <= rhs + 1e-9);
        }
    }
}
