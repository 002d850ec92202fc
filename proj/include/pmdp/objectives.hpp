#pragma once

#include <functional>
#include <vector>

#include "pmdp/types.hpp"

namespace pmdp {

/// Convex per-step loss over state-action distributions, with its gradient
/// and an L1 Lipschitz constant. Oracles take the episode index so
/// adversarial sequences fit the same interface; the shipped objectives
/// ignore it.
struct ObjectiveSpec {
    std::function<double(int t, int n, const Dist& mu_n)> value;
    std::function<Dist(int t, int n, const Dist& mu_n)> gradient;
    double lipschitz = 1.0;
    double floor = 1e-12;
};

/// F_t(mu) summed over slices 1..N; the fixed initial slice carries no loss.
double objective_total(const ObjectiveSpec& objective, int t, const OccupancyMeasure& mu);

/// Gradient slices for the episode problem: entry k is grad f_{t,k+1}(mu_{k+1}).
std::vector<Dist> objective_gradient(const ObjectiveSpec& objective, int t,
                                     const OccupancyMeasure& mu);

/// Negative entropy <mu, log max(mu, floor)>; minimizing drives each slice
/// toward uniform. The floor restores Lipschitz continuity at the boundary;
/// gradient entries below it flatten to log(floor).
ObjectiveSpec entropy_objective(const SpaceDims& dims, double floor = 1e-12);

/// -<r, mu> + <c, mu>^2 with r, c being 0/1 indicators over state-action
/// pairs, constant across actions: 1 at the target cells (reward) and the
/// constraint cells (quadratic penalty) respectively.
ObjectiveSpec obstacle_objective(const SpaceDims& dims, const std::vector<int>& target_cells,
                                 const std::vector<int>& constraint_cells);

} // namespace pmdp
