#include "pmdp/types.hpp"

#include <cmath>
#include <string>

namespace pmdp {

void validate_distribution(const Dist& d, const SpaceDims& dims, double tol) {
    if (d.size() != dims.pairs())
        throw ConfigError("Distribution: expected " + std::to_string(dims.pairs()) +
                          " entries, got " + std::to_string(d.size()));
    if (d.minCoeff() < -tol) throw ConfigError("Distribution: negative entry");
    if (std::abs(d.sum() - 1.0) > tol)
        throw ConfigError("Distribution: mass sums to " + std::to_string(d.sum()));
}

TransitionKernel TransitionKernel::stationary(const MatrixXd& one_step, int horizon) {
    TransitionKernel k;
    k.step.assign(static_cast<std::size_t>(horizon), one_step);
    return k;
}

void TransitionKernel::validate(const SpaceDims& dims, double tol) const {
    if (horizon() != dims.horizon) throw ConfigError("TransitionKernel: horizon mismatch");
    for (const MatrixXd& m : step) {
        if (m.rows() != dims.pairs() || m.cols() != dims.num_states)
            throw ConfigError("TransitionKernel: slice shape mismatch");
        if (m.minCoeff() < -tol) throw ConfigError("TransitionKernel: negative probability");
        for (int r = 0; r < m.rows(); ++r)
            if (std::abs(m.row(r).sum() - 1.0) > tol)
                throw ConfigError("TransitionKernel: row " + std::to_string(r) + " not stochastic");
    }
}

Policy Policy::uniform(const SpaceDims& dims) {
    Policy p;
    p.step.assign(static_cast<std::size_t>(dims.horizon),
                  MatrixXd::Constant(dims.num_states, dims.num_actions, 1.0 / dims.num_actions));
    return p;
}

Policy Policy::mixed_with_uniform(double rate) const {
    Policy out;
    out.step.reserve(step.size());
    for (const MatrixXd& m : step) {
        const double u = rate / static_cast<double>(m.cols());
        out.step.push_back((1.0 - rate) * m.array() + u);
    }
    return out;
}

double Policy::min_entry() const {
    double lo = 1.0;
    for (const MatrixXd& m : step) lo = std::min(lo, m.minCoeff());
    return lo;
}

void Policy::validate(const SpaceDims& dims, double tol) const {
    if (horizon() != dims.horizon) throw ConfigError("Policy: horizon mismatch");
    for (const MatrixXd& m : step) {
        if (m.rows() != dims.num_states || m.cols() != dims.num_actions)
            throw ConfigError("Policy: slice shape mismatch");
        if (m.minCoeff() < -tol) throw ConfigError("Policy: negative probability");
        for (int r = 0; r < m.rows(); ++r)
            if (std::abs(m.row(r).sum() - 1.0) > tol)
                throw ConfigError("Policy: row " + std::to_string(r) + " not stochastic");
    }
}

void OccupancyMeasure::validate(const SpaceDims& dims, double tol) const {
    if (horizon() != dims.horizon) throw ConfigError("OccupancyMeasure: horizon mismatch");
    for (const Dist& d : slice) validate_distribution(d, dims, tol);
}

double norm_inf_1(const OccupancyMeasure& a, const OccupancyMeasure& b) {
    if (a.slice.size() != b.slice.size())
        throw ConfigError("norm_inf_1: slice count mismatch");
    double worst = 0.0;
    for (std::size_t n = 0; n < a.slice.size(); ++n)
        worst = std::max(worst, l1_distance(a.slice[n], b.slice[n]));
    return worst;
}

void Trajectory::validate(const SpaceDims& dims) const {
    if (horizon() != dims.horizon) throw ConfigError("Trajectory: wrong length");
    for (const StateAction& sa : step)
        if (sa.x < 0 || sa.x >= dims.num_states || sa.a < 0 || sa.a >= dims.num_actions)
            throw ConfigError("Trajectory: index out of bounds");
}

} // namespace pmdp
