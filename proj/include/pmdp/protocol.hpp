#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pmdp/gridworld.hpp"
#include "pmdp/objectives.hpp"
#include "pmdp/solver.hpp"

namespace pmdp {

enum class Framework { kKnownRho, kUnknownRho, kEpisodicBaseline };

/// Online run parameters. The defaults mirror the gridworld experiments:
/// eta = eta_lambda = 0.01, alpha_bar = 0.1, gamma = 1000, delta = 0.1.
struct ProtocolConfig {
    int num_episodes = 100;
    int num_agents = 2;
    Framework framework = Framework::kKnownRho;
    double eta = 0.01;
    DualState dual;
    std::optional<double> alpha_bar = 0.1; // unset = feasibility grid search
    double delta = 0.1;
    double gamma = 1000.0;
    std::uint64_t seed = 0;
    double mix_rate = 1e-6;

    /// Bonus magnitude. Negative keeps the theoretical confidence width,
    /// which exceeds the L1 diameter at any reachable episode count, so the
    /// experiment presets set a practical constant here.
    double bonus_c = -1.0;

    /// Mean-field agents: track the exact population distribution and draw
    /// each designated trajectory fresh from it. false simulates num_agents
    /// explicit walkers and samples one uniformly per episode.
    bool mean_field = true;

    // Diagnostics used by the fixed-point and estimation sanity tests.
    bool inject_true_kernel = false;
    bool inject_true_kernel_tilde = false;
    bool zero_bonuses = false;

    std::optional<Policy> initial_policy; // default uniform

    void validate() const;
};

struct EpisodeRecord {
    int episode = 0;          // 1-based
    double loss = 0.0;        // F_t of the realized occupancy
    double comparator_loss = 0.0;
    double rho_gap = 0.0;       // || rho_t - rho ||_1
    double rho_gap_next = 0.0;  // || rho_{t+1} - rho ||_1 (end-of-episode convention)
    double rho_tilde_gap = 0.0; // || rho_tilde_t - rho_t ||_1, unknown-rho runs only
    double lambda_final = 0.0;
    int dual_iters = 0;
    double g_final = 0.0;
    double alpha_bar = 0.0;
};

struct RegretLedger {
    std::vector<EpisodeRecord> records;
    std::vector<double> cumulative_regret; // realized-gap convention, run gamma
    double gamma = 0.0;
};

/// Cumulative periodic regret
///   R_t = sum_{s<=t} (loss_s - comparator_loss_s) + gamma * sum_{s<=t} gap_s.
/// The realized convention charges the start-of-episode gaps (rho_1 = rho
/// contributes zero); end_of_episode_gaps switches the penalty to the
/// distributions each episode hands to the next.
std::vector<double> periodic_regret(const RegretLedger& ledger, double gamma,
                                    bool end_of_episode_gaps = false);

/// Offline optimal periodic policy: its true-kernel occupancy from rho is the
/// regret comparator.
struct Comparator {
    Policy policy;
    OccupancyMeasure occupancy;
    double periodic_defect = 0.0; // || mu_N - rho ||_1
    int iterations = 0;
};

/// Solves min F(mu) over the flow polytope of (true kernel, rho) subject to
/// mu_N ~ rho, by iterating the Lagrangian step with zero bonuses and
/// alpha_bar = 0 until successive occupancies differ by less than tol in the
/// sup-L1 norm. Each iterate's terminal slice is within tol of rho by
/// construction (the dual tolerance is tol). The objective is treated as the
/// episode average; for varying F_t pass an averaged oracle. Throws
/// SolverError when the budget runs out, which advises a larger budget or a
/// relaxed tol.
Comparator offline_optimal_periodic(const Environment& env, const ObjectiveSpec& objective,
                                    double tol, int max_outer_iters = 2000, double eta = 0.05);

/// Comparator losses per episode, F_t evaluated on the fixed comparator
/// occupancy.
std::vector<double> comparator_losses(const Comparator& comparator, const ObjectiveSpec& objective,
                                      int num_episodes);

/// Read-only picture of the loop state at the end of an episode, for
/// checkpointing. Pointers are valid only inside the callback; tilde fields
/// are null outside the unknown-rho framework.
struct ProtocolCheckpointView {
    int episode = 0;
    const VisitCounters* counters = nullptr;
    const VisitCounters* counters_tilde = nullptr;
    double lambda = 0.0;
    const Policy* next_policy = nullptr;
    const OccupancyMeasure* true_occupancy = nullptr;
    const Dist* rho_next = nullptr;
    const Dist* rho_tilde = nullptr;
    const RngStream* sampled_stream = nullptr;
    const RngStream* restart_stream = nullptr;
};

/// Test and instrumentation taps into the episode loop.
struct ProtocolHooks {
    std::function<void(int episode, const Trajectory&)> on_sampled_trajectory;
    std::function<void(int episode, const Policy&, const OccupancyMeasure& true_occupancy)>
        on_episode;
    /// The problem handed to the solver at the end of each episode.
    std::function<void(int episode, const EpisodeProblem&)> on_problem;
    /// Fired after every episode's solve with the current loop state.
    std::function<void(const ProtocolCheckpointView&)> on_checkpoint;
};

/// Runs the reset-free episode loop for the configured framework. The
/// simulator carries the exact rho_t analytically; losses and gaps come from
/// true-kernel rollouts, while the learner only sees sampled trajectories,
/// counters, and (for known-rho) the exact rho_{t+1}. Solver failures are
/// rethrown with the episode index attached.
RegretLedger run_protocol(const Environment& env, const ObjectiveSpec& objective,
                          const ProtocolConfig& config, const Comparator& comparator,
                          const ProtocolHooks* hooks = nullptr);

/// Convenience overload: builds the comparator first (tol 1e-3, default
/// budget).
RegretLedger run_protocol(const Environment& env, const ObjectiveSpec& objective,
                          const ProtocolConfig& config);

RegretLedger run_mdpp_k(const Environment& env, const ObjectiveSpec& objective,
                        ProtocolConfig config, const Comparator& comparator);
RegretLedger run_mdpp_u(const Environment& env, const ObjectiveSpec& objective,
                        ProtocolConfig config, const Comparator& comparator);
RegretLedger run_episodic_baseline(const Environment& env, const ObjectiveSpec& objective,
                                   ProtocolConfig config, const Comparator& comparator);

} // namespace pmdp
