#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "pmdp/errors.hpp"

namespace pmdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Probability mass over state-action pairs, flattened as x * num_actions + a.
using Dist = Eigen::VectorXd;

constexpr double kSimplexTol = 1e-12;       // on construction
constexpr double kRolloutTol = 1e-10;       // after long products
constexpr double kZeroMassFloor = 1e-15;    // state mass below this counts as unvisited

/// Sizes of a finite-horizon tabular problem: |X| states, |A| actions, N steps
/// per episode.
struct SpaceDims {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;

    int pairs() const { return num_states * num_actions; }
    int pair_index(int x, int a) const { return x * num_actions + a; }
    int state_of(int pair) const { return pair / num_actions; }
    int action_of(int pair) const { return pair % num_actions; }

    void validate() const {
        if (num_states < 1 || num_actions < 1 || horizon < 1)
            throw ConfigError("SpaceDims: all of |X|, |A|, N must be >= 1");
    }

    bool operator==(const SpaceDims&) const = default;
};

void validate_distribution(const Dist& d, const SpaceDims& dims, double tol = kSimplexTol);

/// L1 distance between two mass vectors.
inline double l1_distance(const Dist& a, const Dist& b) { return (a - b).lpNorm<1>(); }

/// Time-dependent transition kernel. step[k] is the (|X||A|) x |X| row
/// stochastic matrix governing the move into time k+1; row pair_index(x, a)
/// is p_{k+1}(.|x, a). There are horizon steps even when the dynamics are
/// stationary.
struct TransitionKernel {
    std::vector<MatrixXd> step;

    int horizon() const { return static_cast<int>(step.size()); }

    /// Replicates a single-step kernel across the whole horizon.
    static TransitionKernel stationary(const MatrixXd& one_step, int horizon);

    void validate(const SpaceDims& dims, double tol = kSimplexTol) const;
};

/// Non-stationary random Markov policy. step[k] is the |X| x |A| row
/// stochastic matrix of action probabilities at time k+1.
struct Policy {
    std::vector<MatrixXd> step;

    int horizon() const { return static_cast<int>(step.size()); }

    static Policy uniform(const SpaceDims& dims);

    /// Convex mix with the uniform policy; keeps every entry >= rate / |A|.
    Policy mixed_with_uniform(double rate) const;

    double min_entry() const;

    void validate(const SpaceDims& dims, double tol = kSimplexTol) const;
};

/// Sequence of state-action distributions (mu_n)_{n=0..N}; slice[0] is the
/// initial distribution.
struct OccupancyMeasure {
    std::vector<Dist> slice;

    int horizon() const { return static_cast<int>(slice.size()) - 1; }
    const Dist& terminal() const { return slice.back(); }

    void validate(const SpaceDims& dims, double tol = kRolloutTol) const;
};

/// sup_n || a_n - b_n ||_1 over all slices.
double norm_inf_1(const OccupancyMeasure& a, const OccupancyMeasure& b);

struct StateAction {
    int x = 0;
    int a = 0;
    bool operator==(const StateAction&) const = default;
};

/// One observed episode: (x_n, a_n) for n = 0..N.
struct Trajectory {
    std::vector<StateAction> step;

    int horizon() const { return static_cast<int>(step.size()) - 1; }

    void validate(const SpaceDims& dims) const;
};

} // namespace pmdp
