#include "pmdp/protocol.hpp"

#include <cmath>
#include <string>

#include "pmdp/mdp.hpp"

namespace pmdp {

namespace {

constexpr std::uint64_t kPurposeSampledTrajectory = 1;
constexpr std::uint64_t kPurposeRestartedAgent = 2;
constexpr std::uint64_t kPurposeAgentWalk = 3;
constexpr std::uint64_t kPurposeAgentChoice = 4;

constexpr double kDriftBudget = 1e-9;

StateAction draw_pair(const Dist& dist, const SpaceDims& dims, RngStream& rng) {
    const int pair = rng.categorical(dist);
    return {dims.state_of(pair), dims.action_of(pair)};
}

void settle(Dist& dist, const char* label) {
    const double drift = renormalize(dist);
    if (drift > kDriftBudget)
        throw ConfigError(std::string(label) + ": accumulated drift " + std::to_string(drift));
}

// Explicit walker population for the finite-M mode.
struct AgentPool {
    std::vector<StateAction> state;
    std::vector<RngStream> stream;

    AgentPool(int count, const Dist& rho, const SpaceDims& dims, std::uint64_t seed) {
        state.reserve(static_cast<std::size_t>(count));
        stream.reserve(static_cast<std::size_t>(count));
        for (int j = 0; j < count; ++j) {
            stream.emplace_back(derive_seed(seed, kPurposeAgentWalk, static_cast<std::uint64_t>(j)));
            state.push_back(draw_pair(rho, dims, stream.back()));
        }
    }

    Trajectory walk(int j, const Policy& policy, const TransitionKernel& kernel) {
        Trajectory t = sample_trajectory(policy, kernel, state[static_cast<std::size_t>(j)],
                                         stream[static_cast<std::size_t>(j)]);
        state[static_cast<std::size_t>(j)] = t.step.back();
        return t;
    }
};

} // namespace

void ProtocolConfig::validate() const {
    if (num_episodes < 1) throw ConfigError("ProtocolConfig: num_episodes must be >= 1");
    if (framework != Framework::kEpisodicBaseline && num_agents < 2)
        throw ConfigError("ProtocolConfig: the multi-agent protocol needs at least 2 agents");
    if (eta <= 0.0) throw ConfigError("ProtocolConfig: eta must be positive");
    dual.validate();
    if (alpha_bar && (*alpha_bar < 0.0 || *alpha_bar >= 1.0))
        throw ConfigError("ProtocolConfig: alpha_bar must lie in [0, 1)");
    if (delta <= 0.0 || delta >= 1.0) throw ConfigError("ProtocolConfig: delta must lie in (0, 1)");
    if (gamma < 0.0) throw ConfigError("ProtocolConfig: gamma must be non-negative");
    if (mix_rate < 0.0 || mix_rate >= 1.0)
        throw ConfigError("ProtocolConfig: mix_rate must lie in [0, 1)");
}

std::vector<double> periodic_regret(const RegretLedger& ledger, double gamma,
                                    bool end_of_episode_gaps) {
    std::vector<double> out;
    out.reserve(ledger.records.size());
    double loss_part = 0.0;
    double gap_part = 0.0;
    for (const EpisodeRecord& rec : ledger.records) {
        loss_part += rec.loss - rec.comparator_loss;
        gap_part += end_of_episode_gaps ? rec.rho_gap_next : rec.rho_gap;
        out.push_back(loss_part + gamma * gap_part);
    }
    return out;
}

Comparator offline_optimal_periodic(const Environment& env, const ObjectiveSpec& objective,
                                    double tol, int max_outer_iters, double eta) {
    if (tol <= 0.0) throw ConfigError("offline_optimal_periodic: tol must be positive");
    env.dims.validate();

    EpisodeProblem problem;
    problem.dims = env.dims;
    problem.bonuses = BonusSchedule::zero(env.dims);
    problem.kernel = env.kernel;
    problem.init = env.rho;
    problem.target = env.rho;
    problem.eta = eta;
    problem.alpha_bar = 0.0;

    DualState dual;
    dual.epsilon = tol;
    dual.eta_lambda = 0.05;
    dual.max_iters = 200000;

    Policy pi = Policy::uniform(env.dims);
    OccupancyMeasure mu = forward_rollout(pi, env.rho, env.kernel);
    double lambda_warm = 0.0;

    for (int iter = 1; iter <= max_outer_iters; ++iter) {
        problem.gradient = objective_gradient(objective, 0, mu);
        problem.prior_policy = pi.mixed_with_uniform(1e-9);
        DualState warm = dual;
        warm.lambda = lambda_warm;
        EpisodeSolution sol = solve_episode(problem, warm);
        lambda_warm = sol.diagnostics.lambda_final;

        const double move = norm_inf_1(sol.occupancy, mu);
        pi = std::move(sol.policy);
        mu = std::move(sol.occupancy);
        if (move < tol) {
            Comparator out;
            out.policy = std::move(pi);
            out.occupancy = std::move(mu);
            out.periodic_defect = l1_distance(out.occupancy.terminal(), env.rho);
            out.iterations = iter;
            return out;
        }
    }
    throw SolverError(
        "offline comparator did not converge in " + std::to_string(max_outer_iters) +
            " iterations; raise the budget or relax tol",
        0.0, max_outer_iters);
}

std::vector<double> comparator_losses(const Comparator& comparator, const ObjectiveSpec& objective,
                                      int num_episodes) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(num_episodes));
    for (int t = 1; t <= num_episodes; ++t)
        out.push_back(objective_total(objective, t, comparator.occupancy));
    return out;
}

RegretLedger run_protocol(const Environment& env, const ObjectiveSpec& objective,
                          const ProtocolConfig& config, const Comparator& comparator,
                          const ProtocolHooks* hooks) {
    config.validate();
    env.dims.validate();
    env.kernel.validate(env.dims, kRolloutTol);
    validate_distribution(env.rho, env.dims);

    const SpaceDims dims = env.dims;
    const bool unknown_rho = config.framework == Framework::kUnknownRho;
    const bool baseline = config.framework == Framework::kEpisodicBaseline;

    RngStream sampled_stream(derive_seed(config.seed, kPurposeSampledTrajectory));
    RngStream restart_stream(derive_seed(config.seed, kPurposeRestartedAgent));
    RngStream choice_stream(derive_seed(config.seed, kPurposeAgentChoice));
    std::optional<AgentPool> pool;
    if (!config.mean_field) pool.emplace(config.num_agents, env.rho, dims, config.seed);

    Policy pi = config.initial_policy ? *config.initial_policy : Policy::uniform(dims);
    pi.validate(dims);

    Dist rho_t = env.rho;
    Dist rho_tilde = env.rho;
    VisitCounters counters = VisitCounters::zeros(dims);
    VisitCounters counters_tilde = VisitCounters::zeros(dims);
    double lambda_warm = config.dual.lambda;

    // Gradients are taken at the learner's own model of its occupancy, which
    // starts as the uniform-kernel rollout of the initial policy.
    Dist plan_init = baseline ? env.rho : rho_t;
    OccupancyMeasure mu_solver = forward_rollout(pi, plan_init, empirical_kernel(counters, dims));

    RegretLedger ledger;
    ledger.gamma = config.gamma;
    ledger.records.reserve(static_cast<std::size_t>(config.num_episodes));
    double loss_sum = 0.0;
    double gap_sum = 0.0;

    for (int t = 1; t <= config.num_episodes; ++t) {
        // Realized occupancy of this episode under the true dynamics.
        const OccupancyMeasure mu_true = forward_rollout(pi, rho_t, env.kernel);
        EpisodeRecord rec;
        rec.episode = t;
        rec.loss = objective_total(objective, t, mu_true);
        rec.comparator_loss = objective_total(objective, t, comparator.occupancy);
        rec.rho_gap = l1_distance(rho_t, env.rho);
        if (unknown_rho) rec.rho_tilde_gap = l1_distance(rho_tilde, rho_t);
        if (hooks && hooks->on_episode) hooks->on_episode(t, pi, mu_true);

        Dist rho_next = mu_true.terminal();
        settle(rho_next, "rho");

        // Designated trajectory: fresh start from the exact rho_t in the
        // mean-field mode, a uniformly chosen walker otherwise.
        Trajectory sampled;
        if (config.mean_field) {
            // Population-limit observation: the designated trajectory always
            // starts from the exact population law, and the restarted agent
            // (a measure-zero individual) feeds only the second counter set.
            sampled = sample_trajectory(pi, env.kernel, draw_pair(rho_t, dims, sampled_stream),
                                        sampled_stream);
            if (unknown_rho) {
                Trajectory restarted = sample_trajectory(
                    pi, env.kernel, draw_pair(rho_tilde, dims, restart_stream), restart_stream);
                update_counts(counters_tilde, restarted);
            }
        } else {
            const int pick = static_cast<int>(choice_stream.raw() %
                                              static_cast<std::uint64_t>(config.num_agents));
            for (int j = 0; j < config.num_agents; ++j) {
                const bool restarted_agent = unknown_rho && j == config.num_agents - 1;
                if (restarted_agent)
                    pool->state[static_cast<std::size_t>(j)] =
                        draw_pair(rho_tilde, dims, restart_stream);
                Trajectory walked = pool->walk(j, pi, env.kernel);
                if (restarted_agent) update_counts(counters_tilde, walked);
                if (j == pick) sampled = walked;
            }
        }
        update_counts(counters, sampled);
        if (hooks && hooks->on_sampled_trajectory) hooks->on_sampled_trajectory(t, sampled);

        // Estimates for the next solve.
        const TransitionKernel p_hat =
            config.inject_true_kernel ? env.kernel : empirical_kernel(counters, dims);
        BonusSchedule bonuses =
            config.zero_bonuses
                ? BonusSchedule::zero(dims)
                : bonus_schedule(counters, dims, config.delta, objective.lipschitz,
                                 config.num_episodes, config.bonus_c);
        if (unknown_rho) {
            const TransitionKernel p_tilde = config.inject_true_kernel_tilde
                                                 ? env.kernel
                                                 : empirical_kernel(counters_tilde, dims);
            rho_tilde = propagate_rho_tilde(rho_tilde, pi, p_tilde);
            settle(rho_tilde, "rho_tilde");
        }

        EpisodeProblem problem;
        problem.dims = dims;
        problem.gradient = objective_gradient(objective, t, mu_solver);
        problem.bonuses = std::move(bonuses);
        problem.prior_policy = pi.mixed_with_uniform(config.mix_rate);
        problem.kernel = p_hat;
        problem.init = baseline ? env.rho : (unknown_rho ? rho_tilde : rho_next);
        problem.target = env.rho;
        problem.eta = config.eta;
        problem.alpha_bar = baseline ? std::optional<double>(0.0) : config.alpha_bar;
        if (hooks && hooks->on_problem) hooks->on_problem(t, problem);

        if (baseline) {
            // Pure episodic bonus-OMD learner: no terminal constraint and no
            // terminal shaping. The gamma ||rho_t - rho||_1 regularizer is a
            // constant within each episode's optimization (the learner assumes
            // a reset), so it reaches only the regret accounting; the slack
            // bonus is dropped with the constraint, leaving the exploration
            // bonus.
            problem.bonuses.slack.assign(static_cast<std::size_t>(dims.horizon),
                                         Dist::Zero(dims.pairs()));
            DpResult dp = backward_q_and_policy(problem, 0.0);
            rec.lambda_final = 0.0;
            rec.dual_iters = 1;
            rec.g_final = l1_distance(dp.occupancy.terminal(), env.rho);
            rec.alpha_bar = 0.0;
            pi = std::move(dp.policy);
            mu_solver = std::move(dp.occupancy);
        } else {
            DualState dual = config.dual;
            dual.lambda = lambda_warm;
            try {
                EpisodeSolution sol = solve_episode(problem, dual);
                lambda_warm = sol.diagnostics.lambda_final;
                rec.lambda_final = sol.diagnostics.lambda_final;
                rec.dual_iters = sol.diagnostics.dual_iters;
                rec.g_final = sol.diagnostics.g_final;
                rec.alpha_bar = sol.diagnostics.alpha_bar;
                pi = std::move(sol.policy);
                mu_solver = std::move(sol.occupancy);
            } catch (const SolverError& err) {
                throw SolverError("episode " + std::to_string(t) + ": " + err.what(), err.last_g,
                                  err.iters);
            }
        }

        rho_t = rho_next;
        rec.rho_gap_next = l1_distance(rho_t, env.rho);
        loss_sum += rec.loss - rec.comparator_loss;
        gap_sum += rec.rho_gap;
        ledger.records.push_back(rec);
        ledger.cumulative_regret.push_back(loss_sum + config.gamma * gap_sum);

        if (hooks && hooks->on_checkpoint) {
            ProtocolCheckpointView view;
            view.episode = t;
            view.counters = &counters;
            view.counters_tilde = unknown_rho ? &counters_tilde : nullptr;
            view.lambda = lambda_warm;
            view.next_policy = &pi;
            view.true_occupancy = &mu_true;
            view.rho_next = &rho_t;
            view.rho_tilde = unknown_rho ? &rho_tilde : nullptr;
            view.sampled_stream = &sampled_stream;
            view.restart_stream = &restart_stream;
            hooks->on_checkpoint(view);
        }
    }
    return ledger;
}

RegretLedger run_protocol(const Environment& env, const ObjectiveSpec& objective,
                          const ProtocolConfig& config) {
    const Comparator comparator = offline_optimal_periodic(env, objective, 1e-3);
    return run_protocol(env, objective, config, comparator);
}

RegretLedger run_mdpp_k(const Environment& env, const ObjectiveSpec& objective,
                        ProtocolConfig config, const Comparator& comparator) {
    config.framework = Framework::kKnownRho;
    return run_protocol(env, objective, config, comparator);
}

RegretLedger run_mdpp_u(const Environment& env, const ObjectiveSpec& objective,
                        ProtocolConfig config, const Comparator& comparator) {
    config.framework = Framework::kUnknownRho;
    return run_protocol(env, objective, config, comparator);
}

RegretLedger run_episodic_baseline(const Environment& env, const ObjectiveSpec& objective,
                                   ProtocolConfig config, const Comparator& comparator) {
    config.framework = Framework::kEpisodicBaseline;
    return run_protocol(env, objective, config, comparator);
}

} // namespace pmdp
