#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

namespace pmdp {

/// Deterministic random stream. Wraps std::mt19937_64 (whose sequence is
/// pinned by the standard) and converts to doubles and categorical draws
/// without std::uniform_*_distribution, whose output is implementation
/// defined. Streams for independent purposes are derived from a master seed
/// with splitmix64 so that worker scheduling never changes results.
class RngStream {
  public:
    RngStream() : engine_(0) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Index drawn from an unnormalized non-negative weight vector by a
    /// left-to-right CDF scan. Falls back to the last positive weight when
    /// rounding pushes the draw past the total mass.
    int categorical(const Eigen::VectorXd& weights) {
        const double total = weights.sum();
        double u = uniform01() * total;
        int last_positive = 0;
        for (int i = 0; i < weights.size(); ++i) {
            const double w = weights[i];
            if (w <= 0.0) continue;
            last_positive = i;
            u -= w;
            if (u < 0.0) return i;
        }
        return last_positive;
    }

    std::uint64_t raw() { return engine_(); }

    friend std::ostream& operator<<(std::ostream& os, const RngStream& s) { return os << s.engine_; }
    friend std::istream& operator>>(std::istream& is, RngStream& s) { return is >> s.engine_; }

  private:
    std::mt19937_64 engine_;
};

/// splitmix64 step; the standard way to turn one seed into many.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from (master, purpose, index). Distinct purposes give
/// statistically independent streams; identical inputs always give the same
/// child.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t index = 0) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0x517cc1b727220a95ULL * (purpose + 1);
    (void)splitmix64(s);
    s ^= 0x2545f4914f6cdd1dULL * (index + 1);
    return splitmix64(s);
}

} // namespace pmdp
