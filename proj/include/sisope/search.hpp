#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sisope/estimators.hpp"
#include "sisope/trajectory.hpp"

namespace sisope {

/// Controls for the negligible-state-set search.
struct SearchConfig {
    /// Negligibility threshold: a candidate set is eligible when the mean of
    /// its dropped-weight products is within epsilon of 1 and the absolute
    /// empirical covariance between dropped and retained parts is below
    /// epsilon. Each bound is widened to the larger of epsilon and two
    /// standard errors of the statistic itself, so finite-sample noise in a
    /// genuinely negligible set cannot flip its eligibility: a candidate is
    /// rejected only when the batch shows a statistically meaningful
    /// deviation. Also reused as the relative slack when preferring a larger
    /// eligible set with near-equal estimated MSE.
    double epsilon = 0.01;
    int max_cardinality = 2;
    /// Candidate state universe. nullopt means every state index of the
    /// policies; an explicit empty list means "no candidates" and yields the
    /// empty set. Callers with an MDP at hand typically pass its non-terminal
    /// states.
    std::optional<std::vector<int>> candidate_states;
    /// When true, the first floor(n/2) trajectories drive the search and the
    /// final estimate is computed on the remaining trajectories only,
    /// decoupling selection noise from estimation noise.
    bool split_batch = false;
};

/// One row of the search audit trail, in evaluation order (the empty set
/// first, then cardinality 1, 2, ... each in lexicographic order of sorted
/// state indices).
struct CandidateDiagnostics {
    std::vector<int> dropped;
    double mean_a = 1.0;
    double cov_hat = 0.0;
    double mse_hat = 0.0;
    bool eligible = false;
};

struct SearchResult {
    std::vector<int> best_set;
    double best_mse_hat = 0.0;
    double estimate = 0.0; ///< state-dropping estimate under best_set
    std::vector<CandidateDiagnostics> diagnostics;
};

/// Exhaustively scores every candidate subset up to max_cardinality and keeps
/// the eligible one with the best estimated MSE, preferring a larger set when
/// its score is within a (1 + epsilon) factor of the best so far. Eligibility
/// uses the noise-aware gate described on SearchConfig::epsilon. The empty
/// set is always eligible, so the result never degrades the estimated MSE by
/// more than that slack relative to plain importance sampling.
///
/// Deterministic: equal inputs give identical results, including diagnostics
/// order. Requires a batch with at least 2 trajectories (4 with split_batch),
/// and max_cardinality no larger than the candidate universe.
SearchResult search_negligible_set(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                                   const TabularPolicy& pi_b, const SearchConfig& config);

/// CSV audit dump with header `set,mean_a,cov_hat,mse_hat,eligible`; the set
/// cell joins state indices with ';' (empty cell for the empty set).
void write_diagnostics_csv(const SearchResult& result, std::ostream& out);

}  // namespace sisope
