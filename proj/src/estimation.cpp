#include "pmdp/estimation.hpp"

#include <cmath>
#include <string>

namespace pmdp {

VisitCounters VisitCounters::zeros(const SpaceDims& dims) {
    VisitCounters c;
    c.pair_count.assign(static_cast<std::size_t>(dims.horizon),
                        Eigen::MatrixXi::Zero(dims.num_states, dims.num_actions));
    c.triple_count.assign(static_cast<std::size_t>(dims.horizon),
                          Eigen::MatrixXi::Zero(dims.pairs(), dims.num_states));
    return c;
}

void VisitCounters::check_consistency() const {
    for (std::size_t n = 0; n < pair_count.size(); ++n) {
        const int actions = static_cast<int>(pair_count[n].cols());
        for (int x = 0; x < pair_count[n].rows(); ++x)
            for (int a = 0; a < actions; ++a)
                if (triple_count[n].row(x * actions + a).sum() != pair_count[n](x, a))
                    throw ConfigError("VisitCounters: triple/pair mismatch at slot " +
                                      std::to_string(n));
    }
}

void update_counts(VisitCounters& counters, const Trajectory& traj) {
    const int slots = static_cast<int>(counters.pair_count.size());
    if (traj.horizon() != slots) throw ConfigError("update_counts: trajectory length mismatch");
    const int actions = static_cast<int>(counters.pair_count[0].cols());
    for (int n = 0; n < slots; ++n) {
        const StateAction& cur = traj.step[static_cast<std::size_t>(n)];
        const StateAction& nxt = traj.step[static_cast<std::size_t>(n) + 1];
        counters.pair_count[static_cast<std::size_t>(n)](cur.x, cur.a) += 1;
        counters.triple_count[static_cast<std::size_t>(n)](cur.x * actions + cur.a, nxt.x) += 1;
        // triple/pair identity on the touched cell
        if (counters.triple_count[static_cast<std::size_t>(n)].row(cur.x * actions + cur.a).sum() !=
            counters.pair_count[static_cast<std::size_t>(n)](cur.x, cur.a))
            throw ConfigError("update_counts: counter identity broken");
    }
}

TransitionKernel empirical_kernel(const VisitCounters& counters, const SpaceDims& dims) {
    TransitionKernel kernel;
    kernel.step.reserve(static_cast<std::size_t>(dims.horizon));
    const double uniform = 1.0 / dims.num_states;
    for (int n = 0; n < dims.horizon; ++n) {
        MatrixXd rows(dims.pairs(), dims.num_states);
        const auto& pairs = counters.pair_count[static_cast<std::size_t>(n)];
        const auto& triples = counters.triple_count[static_cast<std::size_t>(n)];
        for (int x = 0; x < dims.num_states; ++x)
            for (int a = 0; a < dims.num_actions; ++a) {
                const int r = dims.pair_index(x, a);
                const int visits = pairs(x, a);
                if (visits >= 1)
                    rows.row(r) = triples.row(r).cast<double>() / static_cast<double>(visits);
                else
                    rows.row(r).setConstant(uniform);
            }
        kernel.step.push_back(std::move(rows));
    }
    return kernel;
}

BonusSchedule BonusSchedule::zero(const SpaceDims& dims) {
    BonusSchedule b;
    b.slack.assign(static_cast<std::size_t>(dims.horizon), Dist::Zero(dims.pairs()));
    b.gradient = b.slack;
    return b;
}

double BonusSchedule::slack_inner(const OccupancyMeasure& mu) const {
    double total = 0.0;
    for (std::size_t n = 0; n < slack.size(); ++n) total += mu.slice[n].dot(slack[n]);
    return total;
}

double bonus_confidence_width(const SpaceDims& dims, double delta, int num_episodes) {
    if (delta <= 0.0 || delta >= 1.0) throw ConfigError("bonus width: delta must lie in (0,1)");
    const double states = dims.num_states;
    const double inside = states * dims.num_actions * dims.horizon * num_episodes / delta;
    return std::sqrt(2.0 * states * std::log(inside));
}

BonusSchedule bonus_schedule(const VisitCounters& counters, const SpaceDims& dims, double delta,
                             double lipschitz, int num_episodes, double c_override) {
    if (delta <= 0.0 || delta >= 1.0) throw ConfigError("bonus_schedule: delta must lie in (0,1)");
    if (lipschitz <= 0.0) throw ConfigError("bonus_schedule: lipschitz must be positive");
    BonusSchedule out;
    out.c_delta = c_override >= 0.0 ? c_override : bonus_confidence_width(dims, delta, num_episodes);
    out.lipschitz = lipschitz;
    out.delta = delta;
    out.slack.reserve(static_cast<std::size_t>(dims.horizon));
    out.gradient.reserve(static_cast<std::size_t>(dims.horizon));
    for (int n = 0; n < dims.horizon; ++n) {
        Dist b(dims.pairs());
        const auto& pairs = counters.pair_count[static_cast<std::size_t>(n)];
        for (int x = 0; x < dims.num_states; ++x)
            for (int a = 0; a < dims.num_actions; ++a)
                b[dims.pair_index(x, a)] =
                    out.c_delta / std::sqrt(std::max(1, pairs(x, a)));
        out.gradient.push_back(lipschitz * (dims.horizon - n) * b);
        out.slack.push_back(std::move(b));
    }
    return out;
}

Dist propagate_rho_tilde(const Dist& rho_tilde, const Policy& policy,
                         const TransitionKernel& tilde_kernel) {
    return forward_rollout(policy, rho_tilde, tilde_kernel).terminal();
}

} // namespace pmdp
