#pragma once

#include <vector>

namespace pmdp {

/// Least-squares slope of log(values) against log(episode index) over the
/// last half of the series (1-based indices). Non-positive values are skipped;
/// returns 0 when fewer than two usable points remain.
double loglog_tail_slope(const std::vector<double>& values);

/// Mean of the last tenth of the series (at least one element).
double last_decile_mean(const std::vector<double>& values);

} // namespace pmdp
