#pragma once

#include <cstdint>
#include <vector>

#include "sisope/mdp.hpp"

namespace sisope {

/// Exact policy value by finite-horizon dynamic programming.
struct TruthReport {
    double true_return = 0.0;
    int horizon_used = 0;
    /// Probability that an episode is still running after horizon_used steps,
    /// i.e. the start-weighted mass the horizon cap cuts off.
    double truncation_mass = 0.0;
};

/// Exact population moments of the weight decomposition under the behaviour
/// policy, from exhaustive enumeration of every (action, successor) branch.
/// A and B are the dropped-set and retained-set ratio products, G the return.
/// Episodes still running at max_len enter the moments with their truncated
/// return, mirroring what a sampler with that horizon cap would produce.
struct ExactMoments {
    double e_a = 0.0;
    double e_bg = 0.0;
    double e_abg = 0.0;
    double cov_a_bg = 0.0;        ///< e_abg - e_a * e_bg
    double var_bg_single = 0.0;   ///< Var of one trajectory's b*g contribution
    double mse_sis_single = 0.0;  ///< var_bg_single + cov_a_bg^2 (one sample)
    double leaf_mass = 0.0;       ///< total probability enumerated; 1 up to roundoff
    std::uint64_t nodes = 0;      ///< tree nodes visited
};

/// Exact bias/variance/MSE of the n-sample state-dropping estimator whose
/// moments are given: bias = -cov, variance = var_single / n.
struct EstimatorStats {
    double bias = 0.0;
    double variance = 0.0;
    double mse = 0.0;
};

/// Backward-induction value of pi on the MDP, over exactly horizon_cap steps
/// from the start distribution. Also reports the surviving probability mass
/// at the cap. Throws std::invalid_argument on state/action shape mismatch.
TruthReport true_return_dp(const TabularMdp& mdp, const TabularPolicy& pi);

/// Walks every behaviour-policy trajectory of length <= max_len (branches of
/// zero probability are pruned exactly). Throws BudgetExceeded when more than
/// node_budget tree nodes would be visited, carrying the count; throws
/// SupportViolation if a branch with pi_b > 0 has pi_e demanding an undefined
/// ratio (never happens: ratios are only formed on pi_b > 0 branches).
ExactMoments enumerate_moments(const TabularMdp& mdp, const TabularPolicy& pi_e,
                               const TabularPolicy& pi_b, const std::vector<int>& dropped_states,
                               int max_len, std::uint64_t node_budget = 10'000'000);

EstimatorStats exact_estimator_stats(const ExactMoments& moments, int n);

/// Result of a grid scan of the corridor domain's slip probability.
struct NoiseScanPoint {
    double noise = 0.0;
    double true_return = 0.0;
    double abs_error = 0.0; ///< |true_return - target|
};

/// Scans noise over a uniform grid of `steps` points on [lo, hi] (policy slip
/// tied to the dynamics slip), computing the exact evaluation-policy return
/// at each, and returns the grid point closest to target. Useful for
/// recovering an unreported noise level from a published exact value.
NoiseScanPoint scan_noise_for_return(int bound, int horizon_cap, double target, double lo = 1e-4,
                                     double hi = 0.4999, int steps = 2000);

}  // namespace sisope
