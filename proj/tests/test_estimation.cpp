#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pmdp/estimation.hpp"
#include "pmdp/gridworld.hpp"
#include "test_util.hpp"

using namespace pmdp;

namespace {

Trajectory fixed_trajectory(const std::vector<std::pair<int, int>>& steps) {
    Trajectory t;
    for (auto [x, a] : steps) t.step.push_back({x, a});
    return t;
}

} // namespace

TEST_CASE("update_counts tallies one visit per step") {
    SpaceDims dims{3, 2, 3};
    VisitCounters counters = VisitCounters::zeros(dims);
    update_counts(counters, fixed_trajectory({{0, 0}, {1, 1}, {2, 0}, {0, 1}}));

    for (int n = 0; n < 3; ++n) CHECK(counters.total_pairs(n) == 1);
    CHECK(counters.pair_count[0](0, 0) == 1);
    CHECK(counters.pair_count[1](1, 1) == 1);
    CHECK(counters.triple_count[0](0 * 2 + 0, 1) == 1);
    counters.check_consistency();

    SUBCASE("the same trajectory twice doubles every count") {
        update_counts(counters, fixed_trajectory({{0, 0}, {1, 1}, {2, 0}, {0, 1}}));
        CHECK(counters.pair_count[0](0, 0) == 2);
        CHECK(counters.triple_count[1](1 * 2 + 1, 2) == 2);
        counters.check_consistency();
    }
}

TEST_CASE("pair counts sum to the number of observed episodes") {
    SpaceDims dims{4, 2, 5};
    RngStream rng(31);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    VisitCounters counters = VisitCounters::zeros(dims);

    for (int episode = 0; episode < 50; ++episode) {
        const int start = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(dims.pairs()));
        update_counts(counters, sample_trajectory(policy, kernel,
                                                  {dims.state_of(start), dims.action_of(start)},
                                                  rng));
    }
    for (int n = 0; n < dims.horizon; ++n) CHECK(counters.total_pairs(n) == 50);
    counters.check_consistency();
}

TEST_CASE("empirical_kernel uses count ratios on visits and uniform elsewhere") {
    SpaceDims dims{3, 2, 2};
    VisitCounters counters = VisitCounters::zeros(dims);
    update_counts(counters, fixed_trajectory({{0, 0}, {1, 0}, {2, 1}}));

    const TransitionKernel k = empirical_kernel(counters, dims);
    k.validate(dims);
    // one observation of (x=0, a=0) -> x=1 at slot 0
    CHECK(k.step[0](dims.pair_index(0, 0), 1) == doctest::Approx(1.0));
    // unvisited rows are uniform
    CHECK(k.step[0](dims.pair_index(2, 1), 0) == doctest::Approx(1.0 / 3));
    CHECK(k.step[1](dims.pair_index(0, 1), 2) == doctest::Approx(1.0 / 3));
}

TEST_CASE("empirical_kernel splits mass between two observed outcomes") {
    SpaceDims dims{3, 1, 1};
    VisitCounters counters = VisitCounters::zeros(dims);
    update_counts(counters, fixed_trajectory({{0, 0}, {1, 0}}));
    update_counts(counters, fixed_trajectory({{0, 0}, {2, 0}}));

    const TransitionKernel k = empirical_kernel(counters, dims);
    CHECK(k.step[0](0, 0) == doctest::Approx(0.0));
    CHECK(k.step[0](0, 1) == doctest::Approx(0.5));
    CHECK(k.step[0](0, 2) == doctest::Approx(0.5));
}

TEST_CASE("bonus schedule follows the inverse square root of the counts") {
    SpaceDims dims{2, 2, 3};
    VisitCounters counters = VisitCounters::zeros(dims);
    const double lipschitz = 2.0;
    const BonusSchedule fresh = bonus_schedule(counters, dims, 0.1, lipschitz, 100);

    // unvisited: b = c_delta everywhere, and the step-0 gradient bonus is l * N * c_delta
    CHECK(fresh.slack[0][0] == doctest::Approx(fresh.c_delta));
    CHECK(fresh.gradient[0][0] == doctest::Approx(lipschitz * 3 * fresh.c_delta));
    CHECK(fresh.gradient[2][0] == doctest::Approx(lipschitz * 1 * fresh.c_delta));

    // count 4 vs count 1 halves the bonus
    counters.pair_count[0](0, 0) = 4;
    counters.pair_count[0](0, 1) = 1;
    const BonusSchedule bumped = bonus_schedule(counters, dims, 0.1, lipschitz, 100);
    CHECK(bumped.slack[0][dims.pair_index(0, 0)] ==
          doctest::Approx(0.5 * bumped.slack[0][dims.pair_index(0, 1)]));
}

TEST_CASE("confidence width matches the directly evaluated constant") {
    // |X| = 121, |A| = 5, N = 40, T = 5000, delta = 0.1, evaluated externally.
    SpaceDims dims{121, 5, 40};
    CHECK(bonus_confidence_width(dims, 0.1, 5000) == doctest::Approx(71.14183340037228).epsilon(1e-12));
}

TEST_CASE("bonuses never increase as counts accumulate") {
    SpaceDims dims{3, 2, 4};
    RngStream rng(12);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    VisitCounters counters = VisitCounters::zeros(dims);

    BonusSchedule prev = bonus_schedule(counters, dims, 0.1, 1.0, 200);
    for (int episode = 0; episode < 30; ++episode) {
        update_counts(counters, sample_trajectory(policy, kernel, {0, 0}, rng));
        const BonusSchedule cur = bonus_schedule(counters, dims, 0.1, 1.0, 200);
        for (int n = 0; n < dims.horizon; ++n) {
            CHECK((cur.slack[n].array() <= prev.slack[n].array() + 1e-15).all());
            CHECK((cur.gradient[n].array() <= prev.gradient[n].array() + 1e-15).all());
        }
        prev = cur;
    }
}

TEST_CASE("empirical kernel concentrates at the theoretical width") {
    // Light version of the acceptance criterion: uniform policy on the open
    // 5x5 grid, the simultaneous L1 bound should hold in nearly every run.
    GridSpec spec = parse_map(open_5_map());
    spec.noise = 0.1;
    const int horizon = 8;
    const Environment env = four_room_kernel(spec, horizon);
    const Policy uniform = Policy::uniform(env.dims);
    const int runs = 10;
    const int episodes = 150;
    const double width = bonus_confidence_width(env.dims, 0.1, episodes);

    int held = 0;
    for (int run = 0; run < runs; ++run) {
        RngStream rng(derive_seed(900, 5, static_cast<std::uint64_t>(run)));
        VisitCounters counters = VisitCounters::zeros(env.dims);
        bool ok = true;
        for (int t = 1; t <= episodes && ok; ++t) {
            const TransitionKernel hat = empirical_kernel(counters, env.dims);
            for (int n = 0; n < horizon && ok; ++n)
                for (int p = 0; p < env.dims.pairs() && ok; ++p) {
                    const int c = counters.pair_count[n](env.dims.state_of(p),
                                                         env.dims.action_of(p));
                    if (c < 1) continue;
                    const double dist =
                        (env.kernel.step[n].row(p) - hat.step[n].row(p)).lpNorm<1>();
                    if (dist > width / std::sqrt(static_cast<double>(c))) ok = false;
                }
            const int start = rng.categorical(env.rho);
            update_counts(counters,
                          sample_trajectory(uniform, env.kernel,
                                            {env.dims.state_of(start), env.dims.action_of(start)},
                                            rng));
        }
        held += ok ? 1 : 0;
    }
    CHECK(held >= 9);
}

TEST_CASE("propagate_rho_tilde fixes stationary distributions") {
    SpaceDims dims{2, 2, 3};
    const TransitionKernel kernel = testutil::self_loop_kernel(dims);
    const Policy uniform = Policy::uniform(dims);
    const Dist stationary = Dist::Constant(4, 0.25);
    const Dist out = propagate_rho_tilde(stationary, uniform, kernel);
    CHECK(l1_distance(out, stationary) <= 1e-12);
}

TEST_CASE("propagate_rho_tilde swaps marginals under the swap kernel") {
    const TransitionKernel kernel = testutil::swap_kernel(1, 1);
    SpaceDims dims{2, 1, 1};
    Dist rho(2);
    rho << 0.9, 0.1;
    const Dist out = propagate_rho_tilde(rho, Policy::uniform(dims), kernel);
    CHECK(out[0] == doctest::Approx(0.1));
    CHECK(out[1] == doctest::Approx(0.9));
}

TEST_CASE("propagate_rho_tilde equals the episode matrix applied to rho") {
    SpaceDims dims{3, 2, 4};
    RngStream rng(55);
    const TransitionKernel kernel = testutil::random_kernel(dims, rng);
    const Policy policy = testutil::random_policy(dims, rng);
    const Dist rho = testutil::random_distribution(dims, rng);

    const Dist via_op = propagate_rho_tilde(rho, policy, kernel);
    const Dist via_matrix = episode_transition_matrix(policy, kernel).transpose() * rho;
    CHECK(l1_distance(via_op, via_matrix) <= 1e-12);
}
