#include "pmdp/solver.hpp"

#include <cmath>
#include <string>

#include "pmdp/mdp.hpp"

namespace pmdp {

void DualState::validate() const {
    if (lambda < 0.0) throw ConfigError("DualState: lambda must be non-negative");
    if (eta_lambda <= 0.0) throw ConfigError("DualState: eta_lambda must be positive");
    if (epsilon <= 0.0) throw ConfigError("DualState: epsilon must be positive");
    if (max_iters < 1) throw ConfigError("DualState: max_iters must be positive");
}

void EpisodeProblem::validate() const {
    dims.validate();
    if (static_cast<int>(gradient.size()) != dims.horizon)
        throw ConfigError("EpisodeProblem: gradient must have one slice per step");
    for (const Dist& g : gradient) {
        if (g.size() != dims.pairs()) throw ConfigError("EpisodeProblem: gradient slice shape");
        if (!g.allFinite()) throw ConfigError("EpisodeProblem: gradient entries must be finite");
    }
    if (static_cast<int>(bonuses.slack.size()) != dims.horizon ||
        static_cast<int>(bonuses.gradient.size()) != dims.horizon)
        throw ConfigError("EpisodeProblem: bonus slot count mismatch");
    prior_policy.validate(dims);
    kernel.validate(dims, kRolloutTol);
    validate_distribution(init, dims, kRolloutTol);
    validate_distribution(target, dims, kRolloutTol);
    if (eta <= 0.0) throw ConfigError("EpisodeProblem: eta must be positive");
    if (alpha_bar && (*alpha_bar < 0.0 || *alpha_bar >= 1.0))
        throw ConfigError("EpisodeProblem: alpha_bar must lie in [0, 1)");
}

Dist terminal_q(double lambda, const Dist& adjusted_terminal_loss, const Dist& target) {
    if (lambda < 0.0) throw ConfigError("terminal_q: lambda must be non-negative");
    if (adjusted_terminal_loss.size() != target.size())
        throw ConfigError("terminal_q: shape mismatch");
    return adjusted_terminal_loss.array() + 2.0 * lambda * (1.0 - target.array());
}

namespace {

// l^lambda on slice k+1. Bonus slots weight slices 0..N-1, so slice N carries
// no bonus and the slice-0 terms are constants absorbed by the constraint.
Dist adjusted_cost(const EpisodeProblem& p, double lambda, int k) {
    const int slice = k + 1;
    Dist cost = p.gradient[static_cast<std::size_t>(k)];
    if (slice <= p.dims.horizon - 1)
        cost -= p.bonuses.gradient[static_cast<std::size_t>(slice)] +
                lambda * p.bonuses.slack[static_cast<std::size_t>(slice)];
    return cost;
}

// Soft-min value per state and the matching closed-form policy row.
// For eta > 0: V(x) = -(1/eta) log sum_a prior(x,a) exp(-eta Q(x,a)),
// pi(a|x) = prior(x,a) exp(-eta Q(x,a)) / normalizer. eta == 0 keeps the
// prior and V(x) = <prior(x,.), Q(x,.)>.
void softmin_layer(const MatrixXd& prior_slice, const Dist& q, double eta, VectorXd& value_out,
                   MatrixXd& policy_out) {
    const int states = static_cast<int>(prior_slice.rows());
    const int actions = static_cast<int>(prior_slice.cols());
    value_out.resize(states);
    policy_out.resize(states, actions);
    for (int x = 0; x < states; ++x) {
        const auto q_row = q.segment(x * actions, actions);
        if (eta == 0.0) {
            policy_out.row(x) = prior_slice.row(x);
            value_out[x] = prior_slice.row(x).dot(q_row);
            continue;
        }
        const double shift = (-eta * q_row.array()).maxCoeff();
        Eigen::ArrayXd weights =
            prior_slice.row(x).transpose().array() * ((-eta * q_row.array()) - shift).exp();
        const double total = weights.sum();
        policy_out.row(x) = (weights / total).transpose();
        value_out[x] = -(shift + std::log(total)) / eta;
    }
}

} // namespace

DpResult backward_q_and_policy(const EpisodeProblem& problem, double lambda) {
    const int n_steps = problem.dims.horizon;
    if (problem.prior_policy.min_entry() <= 0.0)
        throw ConfigError("backward_q_and_policy: prior policy must be strictly positive");
    if (lambda < 0.0) throw ConfigError("backward_q_and_policy: lambda must be non-negative");

    DpResult out;
    out.q.value.assign(static_cast<std::size_t>(n_steps), Dist());
    out.policy.step.assign(static_cast<std::size_t>(n_steps), MatrixXd());

    out.q.value[static_cast<std::size_t>(n_steps) - 1] =
        terminal_q(lambda, adjusted_cost(problem, lambda, n_steps - 1), problem.target);

    VectorXd value;
    for (int k = n_steps - 1; k >= 1; --k) {
        softmin_layer(problem.prior_policy.step[static_cast<std::size_t>(k)],
                      out.q.value[static_cast<std::size_t>(k)], problem.eta, value,
                      out.policy.step[static_cast<std::size_t>(k)]);
        out.q.value[static_cast<std::size_t>(k) - 1] =
            adjusted_cost(problem, lambda, k - 1) +
            problem.kernel.step[static_cast<std::size_t>(k)] * value;
    }
    softmin_layer(problem.prior_policy.step[0], out.q.value[0], problem.eta, value,
                  out.policy.step[0]);

    out.occupancy = forward_rollout(out.policy, problem.init, problem.kernel);
    return out;
}

double constraint_value(const OccupancyMeasure& mu, const Dist& target,
                        const BonusSchedule& bonuses, double alpha_bar, const Dist& ref_init) {
    return l1_distance(mu.terminal(), target) - bonuses.slack_inner(mu) -
           alpha_bar * l1_distance(ref_init, target);
}

DualResult dual_ascent(const EpisodeProblem& problem, const DualState& dual) {
    dual.validate();
    if (!problem.alpha_bar)
        throw ConfigError("dual_ascent: alpha_bar must be fixed before the dual loop");
    const double alpha = *problem.alpha_bar;

    double lambda = dual.lambda;
    for (int iter = 1; iter <= dual.max_iters; ++iter) {
        DpResult dp = backward_q_and_policy(problem, lambda);
        const double g =
            constraint_value(dp.occupancy, problem.target, problem.bonuses, alpha, problem.init);
        if (g <= dual.epsilon)
            return {std::move(dp.occupancy), std::move(dp.policy), lambda, iter, g};
        if (iter == dual.max_iters)
            throw SolverError("dual ascent hit max_iters with G = " + std::to_string(g), g, iter);
        lambda += dual.eta_lambda * g;
    }
    throw SolverError("dual ascent: unreachable", 0.0, dual.max_iters);
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    double step = 0.5;
    for (int k = 1; k <= 10; ++k) {
        grid.push_back(1.0 - step);
        step *= 0.5;
    }
    return grid;
}

double feasibility_alpha_search(const EpisodeProblem& problem_template, const DualState& dual,
                                const std::vector<double>& grid) {
    DualState probe = dual;
    probe.max_iters = std::max(dual.max_iters, 2000);
    double last_g = 0.0;
    int last_iters = 0;
    for (double alpha : grid) {
        EpisodeProblem attempt = problem_template;
        attempt.alpha_bar = alpha;
        try {
            (void)dual_ascent(attempt, probe);
            return alpha;
        } catch (const SolverError& err) {
            last_g = err.last_g;
            last_iters = err.iters;
        }
    }
    throw SolverError("feasibility search exhausted the contraction grid; last G = " +
                          std::to_string(last_g),
                      last_g, last_iters);
}

EpisodeSolution solve_episode(const EpisodeProblem& problem, const DualState& dual) {
    problem.validate();
    if (problem.bregman != BregmanKind::kPolicyGamma)
        throw ConfigError("solve_episode: the closed-form step requires the policy-space divergence");

    EpisodeProblem fixed = problem;
    if (!fixed.alpha_bar) fixed.alpha_bar = feasibility_alpha_search(problem, dual);

    DualResult result = dual_ascent(fixed, dual);
    EpisodeSolution out;
    out.policy = std::move(result.policy);
    out.occupancy = std::move(result.occupancy);
    out.diagnostics = {result.lambda, result.iterations, result.g, *fixed.alpha_bar};
    return out;
}

double lagrangian_value(const EpisodeProblem& problem, double lambda, const Policy& policy) {
    const OccupancyMeasure mu = forward_rollout(policy, problem.init, problem.kernel);
    const int n_steps = problem.dims.horizon;
    const int actions = problem.dims.num_actions;

    double total = lambda * l1_distance(mu.terminal(), problem.target);
    for (int k = 0; k < n_steps; ++k) {
        const Dist& slice = mu.slice[static_cast<std::size_t>(k) + 1];
        total += slice.dot(adjusted_cost(problem, lambda, k));
        if (problem.eta > 0.0) {
            const MatrixXd& pi = policy.step[static_cast<std::size_t>(k)];
            const MatrixXd& prior = problem.prior_policy.step[static_cast<std::size_t>(k)];
            for (int x = 0; x < problem.dims.num_states; ++x)
                for (int a = 0; a < actions; ++a) {
                    const double mass = slice[x * actions + a];
                    if (mass <= 0.0) continue;
                    total += mass / problem.eta * std::log(pi(x, a) / prior(x, a));
                }
        }
    }
    return total;
}

} // namespace pmdp
