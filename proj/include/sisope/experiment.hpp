#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sisope {

/// Full sweep description: domains x batch sizes x replicates x estimators.
/// Loadable from TOML via the CLI; defaults reproduce the benchmark sweep on
/// the corridor domain.
struct ExperimentConfig {
    std::string domain = "deterministic"; ///< "deterministic" | "stochastic"
    std::vector<int> bounds = {3, 4, 5, 6, 7, 8};
    double noise = 0.1;              ///< slip; forced to 0 by the deterministic domain
    double policy_noise = -1.0;      ///< negative tracks the effective slip
    std::vector<int> batch_sizes = {100, 1000};
    int replicates = 25;
    double epsilon = 0.01;           ///< negligible-set search threshold
    std::vector<std::string> estimators = {"is", "pdis", "incris", "sis_lift", "sis_search"};
    std::uint64_t base_seed = 0;
    int horizon_cap = 100;
    std::string output_dir = ".";
    /// When false, every estimator in a cell gets its own freshly seeded
    /// batch instead of sharing the replicate batch.
    bool shared_batch = true;
    bool plot_data = false; ///< also emit per-figure aggregate CSV
};

/// One (domain size, batch size, replicate, estimator) outcome.
struct ResultRow {
    int domain_size = 0; ///< number of states, 2*bound + 1
    int n = 0;
    int replicate = 0;
    std::string estimator;
    double estimate = 0.0;
    double true_return = 0.0;
    double squared_error = 0.0;
    std::vector<int> chosen_set; ///< searched drop set; empty for other estimators
    std::uint64_t seed = 0;      ///< batch seed used for this row
    bool failed = false;         ///< estimator threw; numeric fields are NaN
};

/// Replicate-averaged summary for one (domain size, batch size, estimator).
struct AggregateRow {
    int domain_size = 0;
    int n = 0;
    std::string estimator;
    double mse = 0.0;           ///< mean of per-replicate squared errors
    double mean_estimate = 0.0;
    double std_error = 0.0;     ///< sample std dev of estimates / sqrt(replicates)
    double true_return = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> table;
};

/// Deterministic per-cell seed: replicates are reproducible in isolation by
/// re-deriving this from (base_seed, bound, n, replicate).
std::uint64_t replicate_seed(std::uint64_t base_seed, int bound, int n, int replicate);

/// Runs the full sweep in memory (no file I/O). Rows appear in (bound, n,
/// replicate, estimator-config-order) order; repeated calls with the same
/// config produce identical results. An estimator failure inside one
/// replicate is recorded in that row and does not abort the sweep. Throws
/// std::invalid_argument for an invalid config (unknown domain or estimator
/// label, empty sweep lists, replicates < 1).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV writers; all floats use shortest round-trip formatting so equal
/// results serialize to identical bytes.
/// rows.csv header:
///   domain_size,n,replicate,estimator,estimate,true_return,squared_error,chosen_set,seed
void write_rows_csv(const std::vector<ResultRow>& rows, std::ostream& out);
/// mse_table.csv header: domain_size,n,estimator,mse,mean_estimate,std_error,true_return
void write_mse_table_csv(const std::vector<AggregateRow>& table, std::ostream& out);
/// plot_data.csv: one row per (n, estimator, domain_size) with the mean
/// estimate, its standard error and the residual against truth.
void write_plot_data_csv(const std::vector<AggregateRow>& table, std::ostream& out);

/// Writes rows.csv + mse_table.csv (+ plot_data.csv when configured) into
/// config.output_dir, creating it if needed. Throws std::runtime_error on
/// I/O failure.
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace sisope
