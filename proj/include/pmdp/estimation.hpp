#pragma once

#include "pmdp/mdp.hpp"
#include "pmdp/types.hpp"

namespace pmdp {

/// Per-step visit counts. pair_count[n](x, a) is the number of observed
/// trajectories whose step n sat at (x, a); triple_count[n] is an
/// (|X||A|) x |X| matrix whose row (x, a) holds the outgoing next-state
/// tallies. Slots run n = 0..N-1 because the last step of an episode has no
/// observed successor.
struct VisitCounters {
    std::vector<Eigen::MatrixXi> pair_count;   // N slots, |X| x |A|
    std::vector<Eigen::MatrixXi> triple_count; // N slots, (|X||A|) x |X|

    static VisitCounters zeros(const SpaceDims& dims);

    long total_pairs(int slot) const { return pair_count[static_cast<std::size_t>(slot)].sum(); }

    /// Row-sum consistency: sum_x' triple[n](x,a,x') == pair[n](x,a).
    void check_consistency() const;
};

/// Adds one trajectory to the counts: for n = 0..N-1 the pair (x_n, a_n) and
/// the triple (x_{n+1} | x_n, a_n) each gain one.
void update_counts(VisitCounters& counters, const Trajectory& traj);

/// Maximum-likelihood kernel from the counts. Rows with at least one visit
/// use the count ratio; unvisited rows stay uniform over states so the result
/// is a valid kernel at all times.
TransitionKernel empirical_kernel(const VisitCounters& counters, const SpaceDims& dims);

/// Count-derived optimism terms. slack widens the terminal-law constraint;
/// gradient (the (N - n)-weighted version) is subtracted from the loss
/// gradient to reward poorly visited pairs. Both shrink like one over the
/// square root of the visit count.
struct BonusSchedule {
    std::vector<Dist> slack;    // N slots, b_n over pairs
    std::vector<Dist> gradient; // N slots, bbar_n = lipschitz * (N - n) * b_n
    double c_delta = 0.0;
    double lipschitz = 0.0;
    double delta = 0.0;

    static BonusSchedule zero(const SpaceDims& dims);

    /// Sum over slots n = 0..N-1 of <mu_n, b_n>.
    double slack_inner(const OccupancyMeasure& mu) const;
};

/// Confidence width sqrt(2 |X| log(|X| |A| N T / delta)) of the simultaneous
/// L1 concentration bound.
double bonus_confidence_width(const SpaceDims& dims, double delta, int num_episodes);

/// Builds the schedule with the theoretical width. `c_override`, when
/// non-negative, replaces the width; experiment presets use it because the
/// theoretical constant exceeds the L1 diameter until T is astronomically
/// large.
BonusSchedule bonus_schedule(const VisitCounters& counters, const SpaceDims& dims, double delta,
                             double lipschitz, int num_episodes, double c_override = -1.0);

/// One episode of the restarted-agent estimate: rho_tilde times the episode
/// matrix of (policy, tilde_kernel), computed as the terminal slice of a
/// forward rollout.
Dist propagate_rho_tilde(const Dist& rho_tilde, const Policy& policy,
                         const TransitionKernel& tilde_kernel);

} // namespace pmdp
