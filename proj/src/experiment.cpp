#include "sisope/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "sisope/estimators.hpp"
#include "sisope/format.hpp"
#include "sisope/lift_domain.hpp"
#include "sisope/oracle.hpp"
#include "sisope/rng.hpp"
#include "sisope/search.hpp"

namespace sisope {

namespace {

const std::vector<std::string> kKnownEstimators = {"is", "pdis", "incris", "sis_lift",
                                                   "sis_search"};

void validate_config(const ExperimentConfig& config) {
    if (config.domain != "deterministic" && config.domain != "stochastic")
        throw std::invalid_argument("domain must be 'deterministic' or 'stochastic'");
    if (config.bounds.empty()) throw std::invalid_argument("bounds must be non-empty");
    if (config.batch_sizes.empty()) throw std::invalid_argument("batch_sizes must be non-empty");
    if (config.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (config.estimators.empty()) throw std::invalid_argument("estimators must be non-empty");
    for (const auto& name : config.estimators) {
        bool known = false;
        for (const auto& candidate : kKnownEstimators) known = known || candidate == name;
        if (!known) throw std::invalid_argument("unknown estimator '" + name + "'");
    }
    for (int n : config.batch_sizes)
        if (n < 2) throw std::invalid_argument("batch sizes must be >= 2");
}

double run_one_estimator(const std::string& name, const TrajectoryBatch& batch,
                         const DomainBundle& bundle, double epsilon,
                         std::vector<int>* chosen_set) {
    if (name == "is") return estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy).estimate;
    if (name == "pdis")
        return estimate_pdis(batch, bundle.eval_policy, bundle.behaviour_policy).estimate;
    if (name == "incris")
        return estimate_incris(batch, bundle.eval_policy, bundle.behaviour_policy).estimate;
    if (name == "sis_lift")
        return estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy,
                            bundle.lift_states)
            .estimate;
    // sis_search
    SearchConfig search_config;
    search_config.epsilon = epsilon;
    search_config.max_cardinality = 2;
    search_config.candidate_states = bundle.mdp.non_terminal_states();
    const auto result =
        search_negligible_set(batch, bundle.eval_policy, bundle.behaviour_policy, search_config);
    *chosen_set = result.best_set;
    return result.estimate;
}

} // namespace

std::uint64_t replicate_seed(std::uint64_t base_seed, int bound, int n, int replicate) {
    std::uint64_t seed = mix64(base_seed, static_cast<std::uint64_t>(bound));
    seed = mix64(seed, static_cast<std::uint64_t>(n));
    return mix64(seed, static_cast<std::uint64_t>(replicate));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate_config(config);

    // The deterministic variant ignores any configured slip.
    const double noise = config.domain == "deterministic" ? 0.0 : config.noise;

    ExperimentResult result;
    for (int bound : config.bounds) {
        LiftDomainSpec spec;
        spec.bound = bound;
        spec.noise = noise;
        spec.policy_noise = config.policy_noise;
        spec.horizon_cap = config.horizon_cap;
        const auto bundle = build_lift_domain(spec);
        const double truth = true_return_dp(bundle.mdp, bundle.eval_policy).true_return;

        for (int n : config.batch_sizes) {
            for (int replicate = 0; replicate < config.replicates; ++replicate) {
                const std::uint64_t cell_seed =
                    replicate_seed(config.base_seed, bound, n, replicate);
                TrajectoryBatch shared;
                if (config.shared_batch)
                    shared = sample_batch(bundle.mdp, bundle.behaviour_policy, n, cell_seed);

                for (std::size_t e = 0; e < config.estimators.size(); ++e) {
                    const auto& name = config.estimators[e];
                    ResultRow row;
                    row.domain_size = spec.num_states();
                    row.n = n;
                    row.replicate = replicate;
                    row.estimator = name;
                    row.true_return = truth;
                    row.seed = config.shared_batch
                                   ? cell_seed
                                   : mix64(cell_seed, static_cast<std::uint64_t>(e + 1));

                    try {
                        const TrajectoryBatch& batch =
                            config.shared_batch
                                ? shared
                                : (shared = sample_batch(bundle.mdp, bundle.behaviour_policy, n,
                                                         row.seed));
                        row.estimate =
                            run_one_estimator(name, batch, bundle, config.epsilon, &row.chosen_set);
                        row.squared_error = (row.estimate - truth) * (row.estimate - truth);
                    } catch (const std::exception&) {
                        row.failed = true;
                        row.estimate = std::numeric_limits<double>::quiet_NaN();
                        row.squared_error = std::numeric_limits<double>::quiet_NaN();
                    }
                    result.rows.push_back(std::move(row));
                }
            }
        }
    }

    // Replicate aggregates, in the same (bound, n, estimator) order.
    for (int bound : config.bounds) {
        const int domain_size = 2 * bound + 1;
        for (int n : config.batch_sizes) {
            for (const auto& name : config.estimators) {
                AggregateRow agg;
                agg.domain_size = domain_size;
                agg.n = n;
                agg.estimator = name;
                std::vector<double> estimates;
                double sq_sum = 0.0;
                for (const auto& row : result.rows) {
                    if (row.domain_size != domain_size || row.n != n || row.estimator != name)
                        continue;
                    agg.true_return = row.true_return;
                    estimates.push_back(row.estimate);
                    sq_sum += row.squared_error;
                }
                const auto r = static_cast<double>(estimates.size());
                agg.mse = sq_sum / r;
                double mean = 0.0;
                for (double v : estimates) mean += v;
                mean /= r;
                agg.mean_estimate = mean;
                double var = 0.0;
                if (estimates.size() >= 2) {
                    for (double v : estimates) var += (v - mean) * (v - mean);
                    var /= (r - 1.0);
                }
                agg.std_error = std::sqrt(var / r);
                result.table.push_back(std::move(agg));
            }
        }
    }
    return result;
}

void write_rows_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "domain_size,n,replicate,estimator,estimate,true_return,squared_error,chosen_set,"
           "seed\n";
    for (const auto& row : rows) {
        out << row.domain_size << ',' << row.n << ',' << row.replicate << ',' << row.estimator
            << ',' << format_double(row.estimate) << ',' << format_double(row.true_return) << ','
            << format_double(row.squared_error) << ',' << join_ints(row.chosen_set, ';') << ','
            << row.seed << '\n';
    }
}

void write_mse_table_csv(const std::vector<AggregateRow>& table, std::ostream& out) {
    out << "domain_size,n,estimator,mse,mean_estimate,std_error,true_return\n";
    for (const auto& agg : table) {
        out << agg.domain_size << ',' << agg.n << ',' << agg.estimator << ','
            << format_double(agg.mse) << ',' << format_double(agg.mean_estimate) << ','
            << format_double(agg.std_error) << ',' << format_double(agg.true_return) << '\n';
    }
}

void write_plot_data_csv(const std::vector<AggregateRow>& table, std::ostream& out) {
    out << "n,estimator,domain_size,mean_estimate,residual,std_error,true_return\n";
    for (const auto& agg : table) {
        out << agg.n << ',' << agg.estimator << ',' << agg.domain_size << ','
            << format_double(agg.mean_estimate) << ','
            << format_double(agg.mean_estimate - agg.true_return) << ','
            << format_double(agg.std_error) << ',' << format_double(agg.true_return) << '\n';
    }
}

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + config.output_dir);

    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(config.output_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + name + " for writing");
        return out;
    };

    auto rows = open("rows.csv");
    write_rows_csv(result.rows, rows);
    auto table = open("mse_table.csv");
    write_mse_table_csv(result.table, table);
    if (config.plot_data) {
        auto plot = open("plot_data.csv");
        write_plot_data_csv(result.table, plot);
    }
}

}  // namespace sisope
