#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sisope/mdp.hpp"
#include "sisope/trajectory.hpp"

namespace sisope {

/// Per-trajectory split of the importance weight against a dropped state set.
///
/// For trajectory i with steps (s_t, a_t, r_t) and per-step ratios
/// rho_t = pi_e(a_t|s_t) / pi_b(a_t|s_t):
///   a_weights[i] = product of rho_t over steps with s_t in dropped_set
///   b_weights[i] = product of rho_t over the remaining steps
/// so a_weights[i] * b_weights[i] is the ordinary full importance weight.
/// Empty products are 1. returns[i] is the undiscounted episode return, and
/// retained_visits[i] counts steps at states outside dropped_set.
struct WeightDecomposition {
    std::vector<double> a_weights;
    std::vector<double> b_weights;
    std::vector<double> returns;
    std::vector<int> retained_visits;
    std::vector<int> dropped_set; ///< sorted, duplicate-free

    int size() const { return static_cast<int>(a_weights.size()); }
};

/// Result of one estimator run on one batch.
///
/// estimate is the mean of per_trajectory_contributions (zero-weight
/// trajectories included). estimator_variance_hat is the unbiased sample
/// variance of the contributions divided by n (0 when n < 2). num_truncated
/// counts trajectories cut off by the horizon cap; a high count warns that
/// the return itself is being truncated.
struct EstimateReport {
    std::string estimator_name;
    double estimate = 0.0;
    std::vector<double> per_trajectory_contributions;
    double estimator_variance_hat = 0.0;
    int num_truncated = 0;
    nlohmann::json extra = nlohmann::json::object();

    nlohmann::json to_json() const;
};

/// Components of the closed-form variance cap for a state-dropping estimator.
/// bound = (h * r_max * rho_max^m_b)^2 / 4, from the range bound on a random
/// variable confined to an interval of width h * r_max * rho_max^m_b.
/// r_max is read as the largest absolute one-step reward (heuristic flag kept
/// explicit so downstream consumers know which convention produced it).
struct BoundReport {
    double rho_max = 0.0; ///< max ratio over retained states, actions with pi_b > 0
    int m_b = 0;          ///< max per-trajectory count of retained-state visits
    double r_max = 0.0;
    int h = 0;
    double bound = 0.0;
    bool absolute_range = true;
};

/// Variance/covariance summary of a decomposition, all from the same batch:
///   var_hat = unbiased sample variance of b*g contributions, divided by n
///   cov_hat = unbiased sample covariance of (a, b*g)
///   mse_hat = var_hat + cov_hat^2
/// cov_hat estimates the negated bias of dropping the set, so mse_hat is the
/// usual variance-plus-squared-bias surrogate. Throws std::invalid_argument
/// when the decomposition has fewer than 2 trajectories.
struct MseHat {
    double var_hat = 0.0;
    double cov_hat = 0.0;
    double mse_hat = 0.0;
};

/// Ordinary importance sampling: mean of G_i * prod_t rho_t.
EstimateReport estimate_is(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                           const TabularPolicy& pi_b);

/// Per-decision importance sampling: mean of sum_t rho_{1:t} r_t.
EstimateReport estimate_pdis(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                             const TabularPolicy& pi_b);

/// Per-decision estimator that keeps only the k most recent ratios in each
/// reward's weight, rho_{t-k+1:t} instead of rho_{1:t}. One window size k is
/// selected by minimising an estimated MSE:
///   mse_hat(k) = Var_hat(batch mean of the truncated contributions)
///             + (sum_t Cov_hat(rho_{1:t-k}, rho_{t-k+1:t} r_t))^2
/// where the covariance sum estimates the total bias introduced by dropping
/// the older ratios (the dropped prefix has expectation 1).
///
/// A window size is admissible only if every discarded prefix is nonzero on
/// every trajectory still alive at that step. An exactly-zero prefix is one
/// the evaluation policy cannot produce, so it is never negligible (its
/// ratio sits at 0, not near 1): dropping it would silently rewrite which
/// trajectories are possible, and shorter windows that revive such a
/// trajectory's weight are rejected by the same test. Equivalently k must
/// exceed, over all trajectories containing a zero ratio, the distance from
/// the first zero to the trajectory's end; with no zero ratios anywhere
/// (e.g. both policies share full support) every k is admissible. k =
/// max_length is always admissible and reproduces PDIS exactly; ties are
/// broken toward larger k, i.e. toward less dropping and less bias. The
/// chosen k, its score, and the admissibility floor are recorded in extra
/// as {"k", "mse_hat", "admissible_min_k"}.
EstimateReport estimate_incris(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                               const TabularPolicy& pi_b);

/// Splits every trajectory's importance weight against dropped_states
/// (duplicates and ordering are normalised away; an index outside
/// [0, num_states) throws std::invalid_argument). Throws SupportViolation
/// if any taken action has pi_b = 0.
WeightDecomposition decompose_weights(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                                      const TabularPolicy& pi_b,
                                      const std::vector<int>& dropped_states);

/// State-dropping importance sampling: mean of b_weights[i] * G_i, i.e. the
/// ratios at dropped states are simply omitted from the weight. With an empty
/// dropped set this is exactly estimate_is; dropping every state gives the
/// on-policy mean return. extra records {"dropped": [...]}.
EstimateReport estimate_sis(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                            const TabularPolicy& pi_b, const std::vector<int>& dropped_states);

MseHat empirical_mse_hat(const WeightDecomposition& decomp);

/// Closed-form variance cap for the state-dropping estimator that retains
/// ratios only at retained_states. rho_max scans retained states over actions
/// with pi_b > 0 and throws SupportViolation if some retained state has an
/// action with pi_b = 0 but pi_e > 0 (the ratio, and hence the cap, would be
/// unbounded). m_b is measured on the given batch.
BoundReport variance_upper_bound(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                                 const TabularPolicy& pi_b, double r_max, int h,
                                 const std::vector<int>& retained_states);

}  // namespace sisope
