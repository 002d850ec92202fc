#pragma once

#include "pmdp/mdp.hpp"
#include "pmdp/rng.hpp"
#include "pmdp/types.hpp"

namespace pmdp::testutil {

inline Dist random_distribution(const SpaceDims& dims, RngStream& rng) {
    Dist d(dims.pairs());
    for (int i = 0; i < d.size(); ++i) d[i] = -std::log(1.0 - rng.uniform01());
    d /= d.sum();
    return d;
}

inline TransitionKernel random_kernel(const SpaceDims& dims, RngStream& rng) {
    TransitionKernel k;
    k.step.reserve(static_cast<std::size_t>(dims.horizon));
    for (int n = 0; n < dims.horizon; ++n) {
        MatrixXd m(dims.pairs(), dims.num_states);
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) m(r, c) = -std::log(1.0 - rng.uniform01());
            m.row(r) /= m.row(r).sum();
        }
        k.step.push_back(std::move(m));
    }
    return k;
}

inline Policy random_policy(const SpaceDims& dims, RngStream& rng) {
    Policy p;
    p.step.reserve(static_cast<std::size_t>(dims.horizon));
    for (int n = 0; n < dims.horizon; ++n) {
        MatrixXd m(dims.num_states, dims.num_actions);
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) m(r, c) = -std::log(1.0 - rng.uniform01());
            m.row(r) /= m.row(r).sum();
        }
        p.step.push_back(std::move(m));
    }
    return p;
}

/// Deterministic kernel that swaps two states regardless of the action.
inline TransitionKernel swap_kernel(int num_actions, int horizon) {
    MatrixXd one(2 * num_actions, 2);
    one.setZero();
    for (int a = 0; a < num_actions; ++a) {
        one(a, 1) = 1.0;                // from state 0 to state 1
        one(num_actions + a, 0) = 1.0;  // from state 1 to state 0
    }
    return TransitionKernel::stationary(one, horizon);
}

/// Kernel where every state-action self-loops.
inline TransitionKernel self_loop_kernel(const SpaceDims& dims) {
    MatrixXd one = MatrixXd::Zero(dims.pairs(), dims.num_states);
    for (int x = 0; x < dims.num_states; ++x)
        for (int a = 0; a < dims.num_actions; ++a) one(dims.pair_index(x, a), x) = 1.0;
    return TransitionKernel::stationary(one, dims.horizon);
}

} // namespace pmdp::testutil

#include "pmdp/estimation.hpp"
#include "pmdp/solver.hpp"

namespace pmdp::testutil {

/// Random episode problem whose terminal constraint is guaranteed satisfiable:
/// action 0 moves deterministically to a random home state on every step, so
/// policies can concentrate terminal mass arbitrarily close to the Dirac
/// target at (home, 0). All other transitions, the gradient, the prior, and
/// the initial distribution are random.
inline EpisodeProblem feasible_random_problem(const SpaceDims& dims, RngStream& rng,
                                              double bonus_c, double alpha_bar) {
    EpisodeProblem p;
    p.dims = dims;
    p.kernel = random_kernel(dims, rng);
    const int home = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(dims.num_states));
    for (MatrixXd& step : p.kernel.step)
        for (int x = 0; x < dims.num_states; ++x) {
            step.row(dims.pair_index(x, 0)).setZero();
            step(dims.pair_index(x, 0), home) = 1.0;
        }
    p.init = random_distribution(dims, rng);
    p.prior_policy = random_policy(dims, rng).mixed_with_uniform(1e-3);
    for (int k = 0; k < dims.horizon; ++k) {
        Dist g(dims.pairs());
        for (int i = 0; i < g.size(); ++i) g[i] = 2.0 * rng.uniform01() - 1.0;
        p.gradient.push_back(g);
    }
    VisitCounters counters = VisitCounters::zeros(dims);
    p.bonuses = bonus_schedule(counters, dims, 0.1, 1.0, 100, bonus_c);
    p.target = Dist::Zero(dims.pairs());
    p.target[dims.pair_index(home, 0)] = 1.0;
    p.eta = 0.5;
    p.alpha_bar = alpha_bar;
    return p;
}

} // namespace pmdp::testutil
