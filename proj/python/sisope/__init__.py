"""Off-policy evaluation for tabular MDPs with state-dropping importance sampling."""

from ._core import (
    AggregateRow,
    BoundReport,
    BudgetExceeded,
    CandidateDiagnostics,
    DomainBundle,
    EstimateReport,
    EstimatorStats,
    ExactMoments,
    ExperimentConfig,
    ExperimentResult,
    LiftDomainSpec,
    MseHat,
    NoiseScanPoint,
    ResultRow,
    SearchConfig,
    SearchResult,
    SupportViolation,
    TabularMdp,
    TabularPolicy,
    Trajectory,
    TrajectoryBatch,
    TrajectoryStep,
    TruthReport,
    WeightDecomposition,
    action_ratio,
    build_lift_domain,
    decompose_weights,
    detect_lift_states,
    empirical_mse_hat,
    enumerate_moments,
    estimate_incris,
    estimate_is,
    estimate_pdis,
    estimate_sis,
    exact_estimator_stats,
    replicate_seed,
    run_experiment,
    sample_batch,
    sample_trajectory,
    scan_noise_for_return,
    search_negligible_set,
    true_return_dp,
    variance_upper_bound,
    write_experiment_outputs,
)

__all__ = [
    "AggregateRow",
    "BoundReport",
    "BudgetExceeded",
    "CandidateDiagnostics",
    "DomainBundle",
    "EstimateReport",
    "EstimatorStats",
    "ExactMoments",
    "ExperimentConfig",
    "ExperimentResult",
    "LiftDomainSpec",
    "MseHat",
    "NoiseScanPoint",
    "ResultRow",
    "SearchConfig",
    "SearchResult",
    "SupportViolation",
    "TabularMdp",
    "TabularPolicy",
    "Trajectory",
    "TrajectoryBatch",
    "TrajectoryStep",
    "TruthReport",
    "WeightDecomposition",
    "action_ratio",
    "build_lift_domain",
    "decompose_weights",
    "detect_lift_states",
    "empirical_mse_hat",
    "enumerate_moments",
    "estimate_incris",
    "estimate_is",
    "estimate_pdis",
    "estimate_sis",
    "exact_estimator_stats",
    "replicate_seed",
    "run_experiment",
    "sample_batch",
    "sample_trajectory",
    "scan_noise_for_return",
    "search_negligible_set",
    "true_return_dp",
    "variance_upper_bound",
    "write_experiment_outputs",
]
