#include "pmdp/mdp.hpp"

#include <cmath>

namespace pmdp {

namespace {

SpaceDims dims_of(const Policy& policy, const TransitionKernel& kernel) {
    SpaceDims d;
    d.horizon = kernel.horizon();
    if (d.horizon == 0 || policy.horizon() != d.horizon)
        throw ConfigError("kernel and policy horizons disagree");
    d.num_states = static_cast<int>(kernel.step[0].cols());
    d.num_actions = static_cast<int>(policy.step[0].cols());
    if (kernel.step[0].rows() != static_cast<long>(d.pairs()) ||
        policy.step[0].rows() != d.num_states)
        throw ConfigError("kernel and policy shapes disagree");
    return d;
}

// Next state-action slice from the state marginal m(x) = (K^T mu)(x).
Dist expand_by_policy(const VectorXd& state_marginal, const MatrixXd& policy_slice) {
    const int states = static_cast<int>(policy_slice.rows());
    const int actions = static_cast<int>(policy_slice.cols());
    Dist out(states * actions);
    for (int x = 0; x < states; ++x)
        out.segment(x * actions, actions) = state_marginal[x] * policy_slice.row(x).transpose();
    return out;
}

} // namespace

OccupancyMeasure forward_rollout(const Policy& policy, const Dist& init,
                                 const TransitionKernel& kernel) {
    const SpaceDims dims = dims_of(policy, kernel);
    if (init.size() != dims.pairs()) throw ConfigError("forward_rollout: init size mismatch");

    OccupancyMeasure mu;
    mu.slice.reserve(static_cast<std::size_t>(dims.horizon) + 1);
    mu.slice.push_back(init);
    for (int k = 0; k < dims.horizon; ++k) {
        const VectorXd state_marginal = kernel.step[k].transpose() * mu.slice.back();
        mu.slice.push_back(expand_by_policy(state_marginal, policy.step[k]));
    }
    return mu;
}

MatrixXd episode_transition_matrix(const Policy& policy, const TransitionKernel& kernel) {
    const SpaceDims dims = dims_of(policy, kernel);
    const int pairs = dims.pairs();

    MatrixXd product = MatrixXd::Identity(pairs, pairs);
    for (int k = 0; k < dims.horizon; ++k) {
        // One step over pairs: S(y, y') = p_{k+1}(x'|y) pi_{k+1}(a'|x').
        // Contract the X-sized middle index instead of materializing S.
        const MatrixXd to_state = product * kernel.step[k]; // pairs x |X|
        for (int x = 0; x < dims.num_states; ++x)
            for (int a = 0; a < dims.num_actions; ++a)
                product.col(dims.pair_index(x, a)) = to_state.col(x) * policy.step[k](x, a);
    }
    return product;
}

Policy policy_from_occupancy(const OccupancyMeasure& mu, int num_actions) {
    const int horizon = mu.horizon();
    if (horizon < 1) throw ConfigError("policy_from_occupancy: empty occupancy");
    const int pairs = static_cast<int>(mu.slice[0].size());
    if (num_actions < 1 || pairs % num_actions != 0)
        throw ConfigError("policy_from_occupancy: action count does not divide pair count");
    const int states = pairs / num_actions;

    Policy pi;
    pi.step.reserve(static_cast<std::size_t>(horizon));
    for (int n = 1; n <= horizon; ++n) {
        const Dist& slice = mu.slice[static_cast<std::size_t>(n)];
        MatrixXd rows(states, num_actions);
        for (int x = 0; x < states; ++x) {
            const auto block = slice.segment(x * num_actions, num_actions);
            const double mass = block.sum();
            if (mass > kZeroMassFloor)
                rows.row(x) = block.transpose() / mass;
            else
                rows.row(x).setConstant(1.0 / num_actions);
        }
        pi.step.push_back(std::move(rows));
    }
    return pi;
}

double bellman_flow_residual(const OccupancyMeasure& mu, const TransitionKernel& kernel,
                             const Dist& init) {
    const int horizon = kernel.horizon();
    if (mu.horizon() != horizon) throw ConfigError("bellman_flow_residual: horizon mismatch");
    if (mu.slice[0].size() != init.size())
        throw ConfigError("bellman_flow_residual: init size mismatch");

    double worst = l1_distance(mu.slice[0], init);
    for (int k = 0; k < horizon; ++k) {
        const VectorXd inflow = kernel.step[k].transpose() * mu.slice[static_cast<std::size_t>(k)];
        const int states = static_cast<int>(inflow.size());
        const int actions = static_cast<int>(mu.slice[0].size()) / states;
        const Dist& next = mu.slice[static_cast<std::size_t>(k) + 1];
        for (int x = 0; x < states; ++x) {
            const double outflow = next.segment(x * actions, actions).sum();
            worst = std::max(worst, std::abs(outflow - inflow[x]));
        }
    }
    return worst;
}

Trajectory sample_trajectory(const Policy& policy, const TransitionKernel& kernel,
                             StateAction start, RngStream& rng) {
    const SpaceDims dims = dims_of(policy, kernel);
    if (start.x < 0 || start.x >= dims.num_states || start.a < 0 || start.a >= dims.num_actions)
        throw ConfigError("sample_trajectory: start out of bounds");

    Trajectory traj;
    traj.step.reserve(static_cast<std::size_t>(dims.horizon) + 1);
    traj.step.push_back(start);
    for (int k = 0; k < dims.horizon; ++k) {
        const StateAction& prev = traj.step.back();
        const int x = rng.categorical(kernel.step[k].row(dims.pair_index(prev.x, prev.a)).transpose());
        const int a = rng.categorical(policy.step[k].row(x).transpose());
        traj.step.push_back({x, a});
    }
    return traj;
}

double renormalize(Dist& d) {
    double drift = 0.0;
    for (int i = 0; i < d.size(); ++i) {
        if (d[i] < 0.0) {
            drift += -d[i];
            d[i] = 0.0;
        }
    }
    const double total = d.sum();
    drift += std::abs(total - 1.0);
    if (total > 0.0) d /= total;
    return drift;
}

} // namespace pmdp
