#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sisope/estimators.hpp"
#include "sisope/experiment.hpp"
#include "sisope/lift_domain.hpp"
#include "sisope/oracle.hpp"
#include "sisope/search.hpp"
#include "sisope/trajectory.hpp"

using namespace sisope;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig config;
    config.bounds = {3};
    config.batch_sizes = {10};
    config.replicates = 2;
    config.base_seed = 7;
    return config;
}

const ResultRow& find_row(const ExperimentResult& result, const std::string& estimator,
                          int replicate) {
    for (const auto& row : result.rows)
        if (row.estimator == estimator && row.replicate == replicate) return row;
    throw std::runtime_error("row not found");
}

} // namespace

TEST_CASE("replicate seeds are deterministic and distinct") {
    const auto a = replicate_seed(0, 3, 100, 0);
    CHECK(a == replicate_seed(0, 3, 100, 0));

    std::set<std::uint64_t> seen;
    for (int bound : {3, 4, 5})
        for (int n : {100, 1000})
            for (int rep = 0; rep < 5; ++rep) seen.insert(replicate_seed(0, bound, n, rep));
    CHECK(seen.size() == 30);
    CHECK(replicate_seed(1, 3, 100, 0) != a);
}

TEST_CASE("sweep rows agree with direct estimator calls") {
    const auto config = tiny_config();
    const auto result = run_experiment(config);
    REQUIRE(result.rows.size() == 10); // 1 bound x 1 n x 2 replicates x 5 estimators
    REQUIRE(result.table.size() == 5);

    LiftDomainSpec spec;
    spec.bound = 3;
    spec.noise = 0.0;
    const auto bundle = build_lift_domain(spec);
    const double truth = true_return_dp(bundle.mdp, bundle.eval_policy).true_return;

    for (int rep = 0; rep < 2; ++rep) {
        const auto seed = replicate_seed(7, 3, 10, rep);
        const auto batch = sample_batch(bundle.mdp, bundle.behaviour_policy, 10, seed);

        const auto& is_row = find_row(result, "is", rep);
        CHECK(is_row.domain_size == 7);
        CHECK(is_row.n == 10);
        CHECK(is_row.seed == seed);
        CHECK(is_row.true_return == truth);
        CHECK(is_row.estimate ==
              estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy).estimate);
        CHECK(is_row.squared_error == (is_row.estimate - truth) * (is_row.estimate - truth));
        CHECK_FALSE(is_row.failed);
        CHECK(is_row.chosen_set.empty());

        CHECK(find_row(result, "pdis", rep).estimate ==
              estimate_pdis(batch, bundle.eval_policy, bundle.behaviour_policy).estimate);
        CHECK(find_row(result, "incris", rep).estimate ==
              estimate_incris(batch, bundle.eval_policy, bundle.behaviour_policy).estimate);
        CHECK(find_row(result, "sis_lift", rep).estimate ==
              estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy,
                           bundle.lift_states)
                  .estimate);

        SearchConfig search_config;
        search_config.epsilon = config.epsilon;
        search_config.candidate_states = bundle.mdp.non_terminal_states();
        const auto found = search_negligible_set(batch, bundle.eval_policy,
                                                 bundle.behaviour_policy, search_config);
        const auto& search_row = find_row(result, "sis_search", rep);
        CHECK(search_row.estimate == found.estimate);
        CHECK(search_row.chosen_set == found.best_set);
    }

    // Aggregates are the plain replicate averages.
    for (const auto& agg : result.table) {
        double sq_sum = 0.0, est_sum = 0.0;
        int count = 0;
        for (const auto& row : result.rows) {
            if (row.estimator != agg.estimator) continue;
            sq_sum += row.squared_error;
            est_sum += row.estimate;
            ++count;
        }
        REQUIRE(count == 2);
        CHECK(agg.mse == doctest::Approx(sq_sum / 2.0).epsilon(1e-15));
        CHECK(agg.mean_estimate == doctest::Approx(est_sum / 2.0).epsilon(1e-15));
        CHECK(agg.true_return == truth);
    }
}

TEST_CASE("independent batches draw per-estimator seeds") {
    auto config = tiny_config();
    config.shared_batch = false;
    const auto result = run_experiment(config);
    std::set<std::uint64_t> seeds;
    for (const auto& row : result.rows)
        if (row.replicate == 0) seeds.insert(row.seed);
    CHECK(seeds.size() == 5);
}

TEST_CASE("repeated runs are identical") {
    const auto config = tiny_config();
    const auto a = run_experiment(config);
    const auto b = run_experiment(config);
    std::ostringstream csv_a, csv_b;
    write_rows_csv(a.rows, csv_a);
    write_rows_csv(b.rows, csv_b);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("csv writers produce stable bytes") {
    ResultRow row;
    row.domain_size = 7;
    row.n = 10;
    row.replicate = 0;
    row.estimator = "is";
    row.estimate = 0.5;
    row.true_return = 1.0;
    row.squared_error = 0.25;
    row.seed = 7;
    std::ostringstream rows_out;
    write_rows_csv({row}, rows_out);
    CHECK(rows_out.str() ==
          "domain_size,n,replicate,estimator,estimate,true_return,squared_error,chosen_set,"
          "seed\n7,10,0,is,0.5,1,0.25,,7\n");

    row.estimator = "sis_search";
    row.chosen_set = {2, 4};
    std::ostringstream search_out;
    write_rows_csv({row}, search_out);
    CHECK(search_out.str().find(",2;4,") != std::string::npos);

    AggregateRow agg;
    agg.domain_size = 7;
    agg.n = 10;
    agg.estimator = "is";
    agg.mse = 0.25;
    agg.mean_estimate = 0.5;
    agg.std_error = 0.125;
    agg.true_return = 1.0;
    std::ostringstream table_out;
    write_mse_table_csv({agg}, table_out);
    CHECK(table_out.str() == "domain_size,n,estimator,mse,mean_estimate,std_error,"
                             "true_return\n7,10,is,0.25,0.5,0.125,1\n");

    std::ostringstream plot_out;
    write_plot_data_csv({agg}, plot_out);
    CHECK(plot_out.str() == "n,estimator,domain_size,mean_estimate,residual,std_error,"
                            "true_return\n10,is,7,0.5,-0.5,0.125,1\n");
}

TEST_CASE("output files are written") {
    namespace fs = std::filesystem;
    auto config = tiny_config();
    config.plot_data = true;
    config.output_dir = (fs::temp_directory_path() / "sisope_test_out").string();
    fs::remove_all(config.output_dir);

    const auto result = run_experiment(config);
    write_experiment_outputs(config, result);
    CHECK(fs::exists(fs::path(config.output_dir) / "rows.csv"));
    CHECK(fs::exists(fs::path(config.output_dir) / "mse_table.csv"));
    CHECK(fs::exists(fs::path(config.output_dir) / "plot_data.csv"));

    std::ifstream rows(fs::path(config.output_dir) / "rows.csv");
    std::string header;
    std::getline(rows, header);
    CHECK(header ==
          "domain_size,n,replicate,estimator,estimate,true_return,squared_error,chosen_set,"
          "seed");
    fs::remove_all(config.output_dir);

    // A directory path blocked by an existing file must be refused.
    const auto blocker = fs::temp_directory_path() / "sisope_blocker";
    std::ofstream(blocker).put('x');
    config.output_dir = (blocker / "sub").string();
    CHECK_THROWS_AS(write_experiment_outputs(config, result), std::runtime_error);
    fs::remove(blocker);
}

TEST_CASE("config validation") {
    auto bad_domain = tiny_config();
    bad_domain.domain = "windy";
    CHECK_THROWS_AS(run_experiment(bad_domain), std::invalid_argument);

    auto bad_estimator = tiny_config();
    bad_estimator.estimators = {"is", "dr"};
    CHECK_THROWS_AS(run_experiment(bad_estimator), std::invalid_argument);

    auto bad_replicates = tiny_config();
    bad_replicates.replicates = 0;
    CHECK_THROWS_AS(run_experiment(bad_replicates), std::invalid_argument);

    auto bad_bounds = tiny_config();
    bad_bounds.bounds = {};
    CHECK_THROWS_AS(run_experiment(bad_bounds), std::invalid_argument);

    auto bad_batch = tiny_config();
    bad_batch.batch_sizes = {1};
    CHECK_THROWS_AS(run_experiment(bad_batch), std::invalid_argument);
}
