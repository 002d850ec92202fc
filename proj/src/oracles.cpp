#include "pmdp/oracles.hpp"

#include <cmath>
#include <limits>

#include "pmdp/mdp.hpp"
#include "pmdp/objectives.hpp"

namespace pmdp::oracle {

namespace {

// Recursive walk over all trajectories, accumulating path probabilities into
// the per-slice tallies.
void walk_paths(const Policy& policy, const TransitionKernel& kernel, const SpaceDims& dims,
                int n, int x, int a, double prob, std::vector<Dist>& slices) {
    slices[static_cast<std::size_t>(n)][dims.pair_index(x, a)] += prob;
    if (n == dims.horizon) return;
    const auto row = kernel.step[static_cast<std::size_t>(n)].row(dims.pair_index(x, a));
    const auto& pi = policy.step[static_cast<std::size_t>(n)];
    for (int nx = 0; nx < dims.num_states; ++nx) {
        if (row[nx] == 0.0) continue;
        for (int na = 0; na < dims.num_actions; ++na) {
            const double p = prob * row[nx] * pi(nx, na);
            if (p == 0.0) continue;
            walk_paths(policy, kernel, dims, n + 1, nx, na, p, slices);
        }
    }
}

SpaceDims infer_dims(const Policy& policy, const TransitionKernel& kernel) {
    SpaceDims dims;
    dims.horizon = kernel.horizon();
    dims.num_states = static_cast<int>(kernel.step[0].cols());
    dims.num_actions = static_cast<int>(policy.step[0].cols());
    dims.validate();
    return dims;
}

} // namespace

OccupancyMeasure enumerate_occupancy(const Policy& policy, const Dist& init,
                                     const TransitionKernel& kernel) {
    const SpaceDims dims = infer_dims(policy, kernel);
    std::vector<Dist> slices(static_cast<std::size_t>(dims.horizon) + 1,
                             Dist::Zero(dims.pairs()));
    for (int x = 0; x < dims.num_states; ++x)
        for (int a = 0; a < dims.num_actions; ++a) {
            const double p = init[dims.pair_index(x, a)];
            if (p > 0.0) walk_paths(policy, kernel, dims, 0, x, a, p, slices);
        }
    OccupancyMeasure mu;
    mu.slice = std::move(slices);
    return mu;
}

std::vector<Dist> mc_visit_frequencies(const Policy& policy, const TransitionKernel& kernel,
                                       const Dist& init, int num_samples, RngStream& rng) {
    const SpaceDims dims = infer_dims(policy, kernel);
    std::vector<Dist> freq(static_cast<std::size_t>(dims.horizon) + 1, Dist::Zero(dims.pairs()));
    for (int s = 0; s < num_samples; ++s) {
        const int start = rng.categorical(init);
        const Trajectory traj = sample_trajectory(
            policy, kernel, {dims.state_of(start), dims.action_of(start)}, rng);
        for (int n = 0; n <= dims.horizon; ++n)
            freq[static_cast<std::size_t>(n)][dims.pair_index(
                traj.step[static_cast<std::size_t>(n)].x,
                traj.step[static_cast<std::size_t>(n)].a)] += 1.0;
    }
    for (Dist& f : freq) f /= static_cast<double>(num_samples);
    return freq;
}

void for_each_grid_policy(const SpaceDims& dims, double step,
                          const std::function<void(const Policy&)>& visit) {
    if (dims.num_actions != 2)
        throw ConfigError("for_each_grid_policy: only two-action grids are enumerable");
    if (step <= 0.0 || step > 1.0) throw ConfigError("for_each_grid_policy: bad step");

    std::vector<double> levels;
    for (double g = 0.0; g < 1.0 + step / 2; g += step) levels.push_back(std::min(g, 1.0));
    const int num_levels = static_cast<int>(levels.size());
    const int rows = dims.horizon * dims.num_states;

    Policy policy;
    policy.step.assign(static_cast<std::size_t>(dims.horizon),
                       MatrixXd::Zero(dims.num_states, 2));
    std::vector<int> odometer(static_cast<std::size_t>(rows), 0);

    const auto apply = [&](int row, int level) {
        const int n = row / dims.num_states;
        const int x = row % dims.num_states;
        policy.step[static_cast<std::size_t>(n)](x, 0) = levels[static_cast<std::size_t>(level)];
        policy.step[static_cast<std::size_t>(n)](x, 1) =
            1.0 - levels[static_cast<std::size_t>(level)];
    };
    for (int r = 0; r < rows; ++r) apply(r, 0);

    while (true) {
        visit(policy);
        int r = 0;
        while (r < rows) {
            if (++odometer[static_cast<std::size_t>(r)] < num_levels) {
                apply(r, odometer[static_cast<std::size_t>(r)]);
                break;
            }
            odometer[static_cast<std::size_t>(r)] = 0;
            apply(r, 0);
            ++r;
        }
        if (r == rows) return;
    }
}

namespace {

// Self-contained evaluator for the grid searches: its own rollout recursion
// and objective sums, sharing no code with the solver.
struct GridEvaluator {
    const EpisodeProblem& problem;
    double lambda;
    std::vector<Dist> cost; // l^lambda on slices 1..N

    GridEvaluator(const EpisodeProblem& p, double lam) : problem(p), lambda(lam) {
        cost.reserve(static_cast<std::size_t>(p.dims.horizon));
        for (int k = 0; k < p.dims.horizon; ++k) {
            Dist c = p.gradient[static_cast<std::size_t>(k)];
            if (k + 1 <= p.dims.horizon - 1)
                c -= p.bonuses.gradient[static_cast<std::size_t>(k) + 1] +
                     lambda * p.bonuses.slack[static_cast<std::size_t>(k) + 1];
            cost.push_back(std::move(c));
        }
    }

    OccupancyMeasure rollout(const Policy& pi) const {
        const SpaceDims& d = problem.dims;
        OccupancyMeasure mu;
        mu.slice.reserve(static_cast<std::size_t>(d.horizon) + 1);
        mu.slice.push_back(problem.init);
        for (int k = 0; k < d.horizon; ++k) {
            Dist next = Dist::Zero(d.pairs());
            const Dist& cur = mu.slice.back();
            const MatrixXd& kstep = problem.kernel.step[static_cast<std::size_t>(k)];
            for (int p = 0; p < d.pairs(); ++p) {
                if (cur[p] == 0.0) continue;
                for (int nx = 0; nx < d.num_states; ++nx) {
                    const double mass = cur[p] * kstep(p, nx);
                    if (mass == 0.0) continue;
                    for (int na = 0; na < d.num_actions; ++na)
                        next[d.pair_index(nx, na)] +=
                            mass * pi.step[static_cast<std::size_t>(k)](nx, na);
                }
            }
            mu.slice.push_back(std::move(next));
        }
        return mu;
    }

    // Linear cost plus the weighted policy log-ratio to the prior.
    double objective_value(const Policy& pi, const OccupancyMeasure& mu) const {
        const SpaceDims& d = problem.dims;
        double total = 0.0;
        for (int k = 0; k < d.horizon; ++k) {
            const Dist& slice = mu.slice[static_cast<std::size_t>(k) + 1];
            total += slice.dot(cost[static_cast<std::size_t>(k)]);
            for (int x = 0; x < d.num_states; ++x)
                for (int a = 0; a < d.num_actions; ++a) {
                    const double mass = slice[d.pair_index(x, a)];
                    if (mass <= 0.0) continue;
                    total += mass / problem.eta *
                             std::log(pi.step[static_cast<std::size_t>(k)](x, a) /
                                      problem.prior_policy.step[static_cast<std::size_t>(k)](x, a));
                }
        }
        return total;
    }

    double terminal_gap(const OccupancyMeasure& mu) const {
        return l1_distance(mu.terminal(), problem.target);
    }
};

} // namespace

double grid_min_lagrangian(const EpisodeProblem& problem, double lambda, double step) {
    GridEvaluator eval(problem, lambda);
    double best = std::numeric_limits<double>::infinity();
    for_each_grid_policy(problem.dims, step, [&](const Policy& pi) {
        const OccupancyMeasure mu = eval.rollout(pi);
        const double value = eval.objective_value(pi, mu) + lambda * eval.terminal_gap(mu);
        if (value < best) best = value;
    });
    return best;
}

double grid_min_objective_with_constraint(const EpisodeProblem& problem, double g_cap,
                                          double step) {
    GridEvaluator eval(problem, 0.0);
    const double alpha = problem.alpha_bar.value_or(0.0);
    double best = std::numeric_limits<double>::infinity();
    for_each_grid_policy(problem.dims, step, [&](const Policy& pi) {
        const OccupancyMeasure mu = eval.rollout(pi);
        const double g =
            constraint_value(mu, problem.target, problem.bonuses, alpha, problem.init);
        if (g > g_cap) return;
        const double value = eval.objective_value(pi, mu);
        if (value < best) best = value;
    });
    return best;
}

double grid_min_loss_with_terminal_cap(const Environment& env, const ObjectiveSpec& objective,
                                       double terminal_cap, double step) {
    double best = std::numeric_limits<double>::infinity();
    for_each_grid_policy(env.dims, step, [&](const Policy& pi) {
        const OccupancyMeasure mu = forward_rollout(pi, env.rho, env.kernel);
        if (l1_distance(mu.terminal(), env.rho) > terminal_cap) return;
        const double value = objective_total(objective, 1, mu);
        if (value < best) best = value;
    });
    return best;
}

Dist finite_difference_gradient(const std::function<double(const Dist&)>& f, const Dist& at,
                                double h) {
    Dist grad(at.size());
    Dist probe = at;
    for (int i = 0; i < at.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + h;
        const double up = f(probe);
        probe[i] = saved - h;
        const double down = f(probe);
        probe[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

} // namespace pmdp::oracle
