#include "pmdp/bregman.hpp"

#include <cmath>

namespace pmdp {

namespace {

// mu log(mu / ref) with the 0 log 0 = 0 convention.
double kl_term(double mu, double ref) {
    if (mu <= 0.0) return 0.0;
    if (ref <= 0.0) throw DomainError("bregman: positive mass over a zero reference entry");
    return mu * std::log(mu / ref);
}

} // namespace

double kl_occupancy_divergence(const OccupancyMeasure& mu, const OccupancyMeasure& ref) {
    if (mu.slice.size() != ref.slice.size())
        throw ConfigError("kl_occupancy_divergence: horizon mismatch");
    double total = 0.0;
    for (std::size_t n = 0; n < mu.slice.size(); ++n)
        for (int i = 0; i < mu.slice[n].size(); ++i)
            total += kl_term(mu.slice[n][i], ref.slice[n][i]);
    return total;
}

double policy_gamma_divergence(const OccupancyMeasure& mu, const Policy& mu_policy,
                               const OccupancyMeasure& ref, const Policy& ref_policy) {
    const int horizon = mu.horizon();
    if (ref.horizon() != horizon || mu_policy.horizon() != horizon ||
        ref_policy.horizon() != horizon)
        throw ConfigError("policy_gamma_divergence: horizon mismatch");
    const int actions = static_cast<int>(mu_policy.step[0].cols());
    const int states = static_cast<int>(mu_policy.step[0].rows());

    double total = 0.0;
    for (int n = 1; n <= horizon; ++n) {
        const Dist& slice = mu.slice[static_cast<std::size_t>(n)];
        const MatrixXd& pi = mu_policy.step[static_cast<std::size_t>(n) - 1];
        const MatrixXd& pi_ref = ref_policy.step[static_cast<std::size_t>(n) - 1];
        for (int x = 0; x < states; ++x)
            for (int a = 0; a < actions; ++a) {
                const double mass = slice[x * actions + a];
                if (mass <= 0.0) continue;
                if (pi_ref(x, a) <= 0.0)
                    throw DomainError("bregman: reference policy has a zero entry on support");
                total += mass * std::log(pi(x, a) / pi_ref(x, a));
            }
    }
    for (int i = 0; i < mu.slice[0].size(); ++i) total += kl_term(mu.slice[0][i], ref.slice[0][i]);
    return total;
}

double bregman_divergence(BregmanKind kind, const OccupancyMeasure& mu, const Policy& mu_policy,
                          const OccupancyMeasure& ref, const Policy& ref_policy) {
    switch (kind) {
        case BregmanKind::kKlOccupancy: return kl_occupancy_divergence(mu, ref);
        case BregmanKind::kPolicyGamma:
            return policy_gamma_divergence(mu, mu_policy, ref, ref_policy);
    }
    throw ConfigError("bregman_divergence: unknown kind");
}

} // namespace pmdp
