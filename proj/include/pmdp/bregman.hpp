#pragma once

#include "pmdp/types.hpp"

namespace pmdp {

/// Divergences over occupancy sequences. The policy-space variant admits the
/// closed-form dynamic-programming step; the plain KL over slices is kept for
/// comparison experiments. Both dominate half the squared sup-L1 distance for
/// same-kernel, same-start pairs.
enum class BregmanKind { kKlOccupancy, kPolicyGamma };

/// sum_{n=0..N} sum_{x,a} mu_n log(mu_n / ref_n), with 0 log 0 = 0.
/// Throws DomainError when mu puts mass where the reference has none.
double kl_occupancy_divergence(const OccupancyMeasure& mu, const OccupancyMeasure& ref);

/// sum_{n=1..N} sum_{x,a} mu_n(x,a) log(pi_n(a|x) / ref_pi_n(a|x))
///   + sum_{x,a} mu_0 log(mu_0 / ref_0).
/// mu_policy must be the policy inducing mu (zero-mass rows are irrelevant;
/// they carry no weight). The reference policy must be positive wherever mu
/// puts mass.
double policy_gamma_divergence(const OccupancyMeasure& mu, const Policy& mu_policy,
                               const OccupancyMeasure& ref, const Policy& ref_policy);

double bregman_divergence(BregmanKind kind, const OccupancyMeasure& mu, const Policy& mu_policy,
                          const OccupancyMeasure& ref, const Policy& ref_policy);

} // namespace pmdp
