#pragma once

#include <optional>
#include <vector>

#include "pmdp/bregman.hpp"
#include "pmdp/estimation.hpp"
#include "pmdp/types.hpp"

namespace pmdp {

/// Dual ascent parameters. lambda is the starting multiplier; callers warm
/// start it from the previous episode.
struct DualState {
    double lambda = 0.0;
    double eta_lambda = 0.01;
    double epsilon = 1e-3;
    int max_iters = 5000;

    void validate() const;
};

/// One constrained mirror-descent step over the flow polytope of (kernel,
/// init), with the terminal-law constraint
///   || mu_N - target ||_1 <= sum_{n<N} <mu_n, slack_n> + alpha_bar || init - target ||_1.
///
/// Index conventions: gradient[k] weights occupancy slice k+1 (the loss has no
/// term on the fixed slice 0); bonus slot n weights slice n. alpha_bar unset
/// means "search the feasibility grid" in solve_episode.
struct EpisodeProblem {
    SpaceDims dims;
    std::vector<Dist> gradient;
    BonusSchedule bonuses;
    Policy prior_policy;
    TransitionKernel kernel;
    Dist init;
    Dist target;
    double eta = 0.01;
    std::optional<double> alpha_bar = 0.0;
    BregmanKind bregman = BregmanKind::kPolicyGamma;

    void validate() const;
};

/// State-action value tables of the dualized problem; value[k] is Q_{k+1}.
struct QTable {
    std::vector<Dist> value;
};

/// Terminal table Q_N(x,a) = adjusted_terminal_loss(x,a) + 2 lambda (1 - target(x,a)).
/// This is the expected per-trajectory L1 cost: it equals
/// lambda * 2 (1 - <mu_N, target>), which upper-bounds lambda ||mu_N - target||_1
/// and coincides with it whenever target is a Dirac.
Dist terminal_q(double lambda, const Dist& adjusted_terminal_loss, const Dist& target);

struct DpResult {
    QTable q;
    Policy policy;
    OccupancyMeasure occupancy;
};

/// Solves min_mu <l^lambda, mu> + (1/eta) Gamma(mu, prior) + lambda ||mu_N - target||_1
/// over the flow polytope by one backward sweep, where
/// l^lambda = gradient - gradient_bonus - lambda * slack_bonus on slices 1..N-1
/// and plain gradient on slice N. The per-state soft-min and the closed-form
/// policy
///   pi_{n}(a|x) proportional to prior_n(a|x) exp(-eta Q_n(x,a))
/// are evaluated in log space with per-row max subtraction. eta = 0
/// degenerates to the prior policy. Returns the policy, its Q tables, and its
/// rollout under (kernel, init).
DpResult backward_q_and_policy(const EpisodeProblem& problem, double lambda);

/// G(mu) = ||mu_N - target||_1 - sum_{n<N} <mu_n, slack_n> - alpha_bar ||ref_init - target||_1.
/// Feasible iff G <= 0.
double constraint_value(const OccupancyMeasure& mu, const Dist& target,
                        const BonusSchedule& bonuses, double alpha_bar, const Dist& ref_init);

struct DualResult {
    OccupancyMeasure occupancy;
    Policy policy;
    double lambda = 0.0;
    int iterations = 0;
    double g = 0.0;
};

/// Alternates the closed-form Lagrangian minimizer with multiplier steps
/// lambda += eta_lambda * G until G <= epsilon. The multiplier never
/// decreases. Throws SolverError with the last G after max_iters; that
/// signals either an infeasible alpha_bar or an eta_lambda too small for the
/// budget.
DualResult dual_ascent(const EpisodeProblem& problem, const DualState& dual);

/// Exponentially spaced contraction grid 1/2, 3/4, 7/8, ..., 1 - 2^-10.
std::vector<double> default_alpha_grid();

/// Returns the smallest grid value whose problem admits a feasible point,
/// established constructively by running dual ascent with a generous budget.
/// Throws SolverError when no grid value works.
double feasibility_alpha_search(const EpisodeProblem& problem_template, const DualState& dual,
                                const std::vector<double>& grid = default_alpha_grid());

/// Per-solve facts recorded into the episode ledger.
struct DualDiagnostics {
    double lambda_final = 0.0;
    int dual_iters = 0;
    double g_final = 0.0;
    double alpha_bar = 0.0;
};

struct EpisodeSolution {
    Policy policy;
    OccupancyMeasure occupancy;
    DualDiagnostics diagnostics;
};

/// Full episode step: optional alpha_bar grid search, then dual ascent.
/// Deterministic given its inputs.
EpisodeSolution solve_episode(const EpisodeProblem& problem, const DualState& dual);

/// The scalar the backward sweep minimizes, evaluated for an arbitrary
/// policy: sum_n <mu_n, l^lambda_n> + (1/eta) sum_n <mu_n, log(pi_n / prior_n)>
/// + lambda ||mu_N - target||_1 with mu the rollout of `policy` under
/// (kernel, init). Used by the brute-force optimality checks.
double lagrangian_value(const EpisodeProblem& problem, double lambda, const Policy& policy);

} // namespace pmdp
