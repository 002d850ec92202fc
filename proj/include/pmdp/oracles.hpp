#pragma once

#include <functional>

#include "pmdp/gridworld.hpp"
#include "pmdp/objectives.hpp"
#include "pmdp/solver.hpp"

namespace pmdp::oracle {

/// Exact occupancy by explicit summation over every trajectory. Exponential
/// in the horizon; usable only on toy instances, which is the point: it
/// shares no code with forward_rollout.
OccupancyMeasure enumerate_occupancy(const Policy& policy, const Dist& init,
                                     const TransitionKernel& kernel);

/// Per-slice empirical state-action frequencies over sampled episodes whose
/// starts are drawn from init. Slice 0 counts the starts.
std::vector<Dist> mc_visit_frequencies(const Policy& policy, const TransitionKernel& kernel,
                                       const Dist& init, int num_samples, RngStream& rng);

/// Visits every policy whose rows lie on the two-action probability grid
/// {0, step, 2 step, ..., 1}. Throws unless num_actions == 2; grids over more
/// actions would not finish on any instance worth checking.
void for_each_grid_policy(const SpaceDims& dims, double step,
                          const std::function<void(const Policy&)>& visit);

/// Brute-force minimum of the dualized episode objective over the policy
/// grid: min over grid policies of
///   sum_n <mu_n, l^lambda_n> + (1/eta) KL-to-prior + lambda ||mu_N - target||_1.
/// Evaluates with its own forward recursion, independent of the solver path.
double grid_min_lagrangian(const EpisodeProblem& problem, double lambda, double step);

/// Brute-force minimum of the undualized objective over grid policies whose
/// rollout satisfies G(mu) <= g_cap.
double grid_min_objective_with_constraint(const EpisodeProblem& problem, double g_cap,
                                          double step);

/// Brute-force minimum of a convex loss F over grid policies whose rollout
/// terminal slice lies within terminal_cap of target (L1).
double grid_min_loss_with_terminal_cap(const Environment& env, const ObjectiveSpec& objective,
                                       double terminal_cap, double step);

/// Central finite differences of a scalar function of a mass vector.
Dist finite_difference_gradient(const std::function<double(const Dist&)>& f, const Dist& at,
                                double h = 1e-6);

} // namespace pmdp::oracle
