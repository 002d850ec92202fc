#include "pmdp/analysis.hpp"

#include <cmath>
#include <cstddef>

namespace pmdp {

double loglog_tail_slope(const std::vector<double>& values) {
    const std::size_t n = values.size();
    const std::size_t begin = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t i = begin; i < n; ++i) {
        if (values[i] <= 0.0) continue;
        const double x = std::log(static_cast<double>(i + 1));
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return 0.0;
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (count * sxy - sx * sy) / denom;
}

double last_decile_mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    std::size_t take = values.size() / 10;
    if (take == 0) take = 1;
    double total = 0.0;
    for (std::size_t i = values.size() - take; i < values.size(); ++i) total += values[i];
    return total / static_cast<double>(take);
}

} // namespace pmdp
