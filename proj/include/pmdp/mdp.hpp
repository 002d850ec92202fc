#pragma once

#include "pmdp/rng.hpp"
#include "pmdp/types.hpp"

namespace pmdp {

/// Propagates an initial state-action distribution through the kernel under a
/// policy:
///   mu_{n+1}(x, a) = sum_{x', a'} mu_n(x', a') p_{n+1}(x | x', a') pi_{n+1}(a | x).
/// Returns all N+1 slices, slice 0 being `init`.
OccupancyMeasure forward_rollout(const Policy& policy, const Dist& init,
                                 const TransitionKernel& kernel);

/// N-step episode transition matrix over state-action pairs, built by direct
/// composition of the per-step matrices p_n(x'|x,a) pi_n(a'|x'). Every row
/// sums to one; for any distribution nu, nu^T P equals the terminal slice of
/// forward_rollout(policy, nu, kernel).
MatrixXd episode_transition_matrix(const Policy& policy, const TransitionKernel& kernel);

/// Conditional policy pi_n(a|x) = mu_n(x, a) / sum_a' mu_n(x, a') recovered
/// from slices 1..N. States with mass below kZeroMassFloor get a uniform row.
Policy policy_from_occupancy(const OccupancyMeasure& mu, int num_actions);

/// Worst violation of the Bellman flow constraints: the max over (n, x) of
/// |sum_a mu_{n+1}(x, a) - sum_{x', a'} mu_n(x', a') p_{n+1}(x | x', a')| and
/// of ||mu_0 - init||_1. Zero (up to tolerance) iff mu lies in the flow
/// polytope of (kernel, init).
double bellman_flow_residual(const OccupancyMeasure& mu, const TransitionKernel& kernel,
                             const Dist& init);

/// Samples one episode: (x_0, a_0) = start, then x_n ~ p_n(.|x_{n-1}, a_{n-1})
/// and a_n ~ pi_n(.|x_n). Deterministic given the stream state.
Trajectory sample_trajectory(const Policy& policy, const TransitionKernel& kernel,
                             StateAction start, RngStream& rng);

/// Renormalizes a distribution in place and returns the absolute drift that
/// was removed. Accumulated float error over long products stays tiny; the
/// protocol asserts the returned drift < 1e-9 at episode boundaries.
double renormalize(Dist& d);

} // namespace pmdp
