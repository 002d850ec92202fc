#include "pmdp/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace pmdp {

double objective_total(const ObjectiveSpec& objective, int t, const OccupancyMeasure& mu) {
    double total = 0.0;
    for (int n = 1; n <= mu.horizon(); ++n)
        total += objective.value(t, n, mu.slice[static_cast<std::size_t>(n)]);
    return total;
}

std::vector<Dist> objective_gradient(const ObjectiveSpec& objective, int t,
                                     const OccupancyMeasure& mu) {
    std::vector<Dist> grad;
    grad.reserve(static_cast<std::size_t>(mu.horizon()));
    for (int n = 1; n <= mu.horizon(); ++n)
        grad.push_back(objective.gradient(t, n, mu.slice[static_cast<std::size_t>(n)]));
    return grad;
}

ObjectiveSpec entropy_objective(const SpaceDims& dims, double floor) {
    if (floor <= 0.0) throw ConfigError("entropy_objective: floor must be positive");
    (void)dims;
    ObjectiveSpec spec;
    spec.floor = floor;
    spec.lipschitz = std::abs(std::log(floor)) + 1.0;
    spec.value = [floor](int, int, const Dist& mu) {
        double total = 0.0;
        for (int i = 0; i < mu.size(); ++i) total += mu[i] * std::log(std::max(mu[i], floor));
        return total;
    };
    spec.gradient = [floor](int, int, const Dist& mu) {
        Dist g(mu.size());
        const double at_floor = std::log(floor);
        for (int i = 0; i < mu.size(); ++i)
            g[i] = mu[i] >= floor ? std::log(mu[i]) + 1.0 : at_floor;
        return g;
    };
    return spec;
}

ObjectiveSpec obstacle_objective(const SpaceDims& dims, const std::vector<int>& target_cells,
                                 const std::vector<int>& constraint_cells) {
    for (int cell : target_cells)
        if (std::find(constraint_cells.begin(), constraint_cells.end(), cell) !=
            constraint_cells.end())
            throw ConfigError("obstacle_objective: target and constraint cells must be disjoint");
    Dist reward = Dist::Zero(dims.pairs());
    Dist penalty = Dist::Zero(dims.pairs());
    for (int cell : target_cells) {
        if (cell < 0 || cell >= dims.num_states)
            throw ConfigError("obstacle_objective: target cell out of range");
        for (int a = 0; a < dims.num_actions; ++a) reward[dims.pair_index(cell, a)] = 1.0;
    }
    for (int cell : constraint_cells) {
        if (cell < 0 || cell >= dims.num_states)
            throw ConfigError("obstacle_objective: constraint cell out of range");
        for (int a = 0; a < dims.num_actions; ++a) penalty[dims.pair_index(cell, a)] = 1.0;
    }

    ObjectiveSpec spec;
    spec.lipschitz = 1.0 + 2.0 * penalty.sum();
    spec.value = [reward, penalty](int, int, const Dist& mu) {
        const double hit = penalty.dot(mu);
        return -reward.dot(mu) + hit * hit;
    };
    spec.gradient = [reward, penalty](int, int, const Dist& mu) {
        return Dist(-reward + 2.0 * penalty.dot(mu) * penalty);
    };
    return spec;
}

} // namespace pmdp
