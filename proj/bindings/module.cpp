#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sisope/errors.hpp"
#include "sisope/estimators.hpp"
#include "sisope/experiment.hpp"
#include "sisope/lift_domain.hpp"
#include "sisope/oracle.hpp"
#include "sisope/search.hpp"
#include "sisope/trajectory.hpp"

namespace py = pybind11;
using namespace sisope;

PYBIND11_MODULE(_core, m) {
    m.doc() = "off-policy evaluation for tabular MDPs with state-dropping "
              "importance sampling";

    py::register_exception<SupportViolation>(m, "SupportViolation");
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded");

    py::class_<TabularMdp>(m, "TabularMdp")
        .def(py::init<int, int, std::vector<double>, std::vector<double>, std::vector<int>,
                      std::vector<double>, int>(),
             py::arg("num_states"), py::arg("num_actions"), py::arg("transition"),
             py::arg("reward"), py::arg("terminal_states"), py::arg("start_distribution"),
             py::arg("horizon_cap"))
        .def_property_readonly("num_states", &TabularMdp::num_states)
        .def_property_readonly("num_actions", &TabularMdp::num_actions)
        .def_property_readonly("horizon_cap", &TabularMdp::horizon_cap)
        .def("transition", &TabularMdp::transition)
        .def("reward", &TabularMdp::reward)
        .def("is_terminal", &TabularMdp::is_terminal)
        .def_property_readonly("terminal_states", &TabularMdp::terminal_states)
        .def_property_readonly("start_distribution", &TabularMdp::start_distribution)
        .def("non_terminal_states", &TabularMdp::non_terminal_states)
        .def("to_json", [](const TabularMdp& mdp) { return mdp_to_json(mdp).dump(); });

    py::class_<TabularPolicy>(m, "TabularPolicy")
        .def(py::init<int, int, std::vector<double>>(), py::arg("num_states"),
             py::arg("num_actions"), py::arg("probs"))
        .def_static("uniform", &TabularPolicy::uniform)
        .def_property_readonly("num_states", &TabularPolicy::num_states)
        .def_property_readonly("num_actions", &TabularPolicy::num_actions)
        .def("prob", &TabularPolicy::prob);

    m.def("action_ratio", &action_ratio, py::arg("pi_e"), py::arg("pi_b"), py::arg("state"),
          py::arg("action"));

    py::class_<TrajectoryStep>(m, "TrajectoryStep")
        .def_readonly("state", &TrajectoryStep::state)
        .def_readonly("action", &TrajectoryStep::action)
        .def_readonly("reward", &TrajectoryStep::reward);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("steps", &Trajectory::steps)
        .def_readonly("terminated", &Trajectory::terminated)
        .def_readonly("truncated", &Trajectory::truncated)
        .def_readonly("seed", &Trajectory::seed)
        .def("length", &Trajectory::length)
        .def("total_return", &Trajectory::total_return)
        .def("to_jsonl", [](const Trajectory& t) { return to_jsonl_line(t); })
        .def_static("from_jsonl", &from_jsonl_line);

    py::class_<TrajectoryBatch>(m, "TrajectoryBatch")
        .def_readonly("trajectories", &TrajectoryBatch::trajectories)
        .def_readonly("base_seed", &TrajectoryBatch::base_seed)
        .def("size", &TrajectoryBatch::size)
        .def("to_jsonl",
             [](const TrajectoryBatch& batch) {
                 std::ostringstream out;
                 write_jsonl(batch, out);
                 return out.str();
             })
        .def_static("from_jsonl", [](const std::string& text) {
            std::istringstream in(text);
            return read_jsonl(in);
        });

    m.def("sample_trajectory", &sample_trajectory, py::arg("mdp"), py::arg("policy"),
          py::arg("seed"));
    m.def("sample_batch", &sample_batch, py::arg("mdp"), py::arg("policy"), py::arg("n"),
          py::arg("base_seed"));

    py::class_<LiftDomainSpec>(m, "LiftDomainSpec")
        .def(py::init<>())
        .def_readwrite("bound", &LiftDomainSpec::bound)
        .def_readwrite("noise", &LiftDomainSpec::noise)
        .def_readwrite("policy_noise", &LiftDomainSpec::policy_noise)
        .def_readwrite("horizon_cap", &LiftDomainSpec::horizon_cap)
        .def("resolved_policy_noise", &LiftDomainSpec::resolved_policy_noise)
        .def("num_states", &LiftDomainSpec::num_states)
        .def("state_index", &LiftDomainSpec::state_index)
        .def("state_coordinate", &LiftDomainSpec::state_coordinate);

    py::class_<DomainBundle>(m, "DomainBundle")
        .def_readonly("mdp", &DomainBundle::mdp)
        .def_readonly("eval_policy", &DomainBundle::eval_policy)
        .def_readonly("behaviour_policy", &DomainBundle::behaviour_policy)
        .def_readonly("lift_states", &DomainBundle::lift_states);

    m.def("build_lift_domain", &build_lift_domain, py::arg("spec"));
    m.def("detect_lift_states", &detect_lift_states, py::arg("mdp"));

    py::class_<WeightDecomposition>(m, "WeightDecomposition")
        .def_readonly("a_weights", &WeightDecomposition::a_weights)
        .def_readonly("b_weights", &WeightDecomposition::b_weights)
        .def_readonly("returns", &WeightDecomposition::returns)
        .def_readonly("retained_visits", &WeightDecomposition::retained_visits)
        .def_readonly("dropped_set", &WeightDecomposition::dropped_set)
        .def("size", &WeightDecomposition::size);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("estimator_name", &EstimateReport::estimator_name)
        .def_readonly("estimate", &EstimateReport::estimate)
        .def_readonly("per_trajectory_contributions",
                      &EstimateReport::per_trajectory_contributions)
        .def_readonly("estimator_variance_hat", &EstimateReport::estimator_variance_hat)
        .def_readonly("num_truncated", &EstimateReport::num_truncated)
        .def_property_readonly("extra",
                               [](const EstimateReport& r) { return r.extra.dump(); })
        .def("to_json", [](const EstimateReport& r) { return r.to_json().dump(); });

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("rho_max", &BoundReport::rho_max)
        .def_readonly("m_b", &BoundReport::m_b)
        .def_readonly("r_max", &BoundReport::r_max)
        .def_readonly("h", &BoundReport::h)
        .def_readonly("bound", &BoundReport::bound)
        .def_readonly("absolute_range", &BoundReport::absolute_range);

    py::class_<MseHat>(m, "MseHat")
        .def_readonly("var_hat", &MseHat::var_hat)
        .def_readonly("cov_hat", &MseHat::cov_hat)
        .def_readonly("mse_hat", &MseHat::mse_hat);

    m.def("estimate_is", &estimate_is, py::arg("batch"), py::arg("pi_e"), py::arg("pi_b"));
    m.def("estimate_pdis", &estimate_pdis, py::arg("batch"), py::arg("pi_e"), py::arg("pi_b"));
    m.def("estimate_incris", &estimate_incris, py::arg("batch"), py::arg("pi_e"),
          py::arg("pi_b"));
    m.def("decompose_weights", &decompose_weights, py::arg("batch"), py::arg("pi_e"),
          py::arg("pi_b"), py::arg("dropped_states"));
    m.def("estimate_sis", &estimate_sis, py::arg("batch"), py::arg("pi_e"), py::arg("pi_b"),
          py::arg("dropped_states"));
    m.def("empirical_mse_hat", &empirical_mse_hat, py::arg("decomp"));
    m.def("variance_upper_bound", &variance_upper_bound, py::arg("batch"), py::arg("pi_e"),
          py::arg("pi_b"), py::arg("r_max"), py::arg("h"), py::arg("retained_states"));

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &SearchConfig::epsilon)
        .def_readwrite("max_cardinality", &SearchConfig::max_cardinality)
        .def_readwrite("candidate_states", &SearchConfig::candidate_states)
        .def_readwrite("split_batch", &SearchConfig::split_batch);

    py::class_<CandidateDiagnostics>(m, "CandidateDiagnostics")
        .def_readonly("dropped", &CandidateDiagnostics::dropped)
        .def_readonly("mean_a", &CandidateDiagnostics::mean_a)
        .def_readonly("cov_hat", &CandidateDiagnostics::cov_hat)
        .def_readonly("mse_hat", &CandidateDiagnostics::mse_hat)
        .def_readonly("eligible", &CandidateDiagnostics::eligible);

    py::class_<SearchResult>(m, "SearchResult")
        .def_readonly("best_set", &SearchResult::best_set)
        .def_readonly("best_mse_hat", &SearchResult::best_mse_hat)
        .def_readonly("estimate", &SearchResult::estimate)
        .def_readonly("diagnostics", &SearchResult::diagnostics)
        .def("diagnostics_csv", [](const SearchResult& result) {
            std::ostringstream out;
            write_diagnostics_csv(result, out);
            return out.str();
        });

    m.def("search_negligible_set", &search_negligible_set, py::arg("batch"), py::arg("pi_e"),
          py::arg("pi_b"), py::arg("config"));

    py::class_<TruthReport>(m, "TruthReport")
        .def_readonly("true_return", &TruthReport::true_return)
        .def_readonly("horizon_used", &TruthReport::horizon_used)
        .def_readonly("truncation_mass", &TruthReport::truncation_mass);

    py::class_<ExactMoments>(m, "ExactMoments")
        .def_readonly("e_a", &ExactMoments::e_a)
        .def_readonly("e_bg", &ExactMoments::e_bg)
        .def_readonly("e_abg", &ExactMoments::e_abg)
        .def_readonly("cov_a_bg", &ExactMoments::cov_a_bg)
        .def_readonly("var_bg_single", &ExactMoments::var_bg_single)
        .def_readonly("mse_sis_single", &ExactMoments::mse_sis_single)
        .def_readonly("leaf_mass", &ExactMoments::leaf_mass)
        .def_readonly("nodes", &ExactMoments::nodes);

    py::class_<EstimatorStats>(m, "EstimatorStats")
        .def_readonly("bias", &EstimatorStats::bias)
        .def_readonly("variance", &EstimatorStats::variance)
        .def_readonly("mse", &EstimatorStats::mse);

    py::class_<NoiseScanPoint>(m, "NoiseScanPoint")
        .def_readonly("noise", &NoiseScanPoint::noise)
        .def_readonly("true_return", &NoiseScanPoint::true_return)
        .def_readonly("abs_error", &NoiseScanPoint::abs_error);

    m.def("true_return_dp", &true_return_dp, py::arg("mdp"), py::arg("pi"));
    m.def("enumerate_moments", &enumerate_moments, py::arg("mdp"), py::arg("pi_e"),
          py::arg("pi_b"), py::arg("dropped_states"), py::arg("max_len"),
          py::arg("node_budget") = 10'000'000);
    m.def("exact_estimator_stats", &exact_estimator_stats, py::arg("moments"), py::arg("n"));
    m.def("scan_noise_for_return", &scan_noise_for_return, py::arg("bound"),
          py::arg("horizon_cap"), py::arg("target"), py::arg("lo") = 1e-4,
          py::arg("hi") = 0.4999, py::arg("steps") = 2000);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("domain", &ExperimentConfig::domain)
        .def_readwrite("bounds", &ExperimentConfig::bounds)
        .def_readwrite("noise", &ExperimentConfig::noise)
        .def_readwrite("policy_noise", &ExperimentConfig::policy_noise)
        .def_readwrite("batch_sizes", &ExperimentConfig::batch_sizes)
        .def_readwrite("replicates", &ExperimentConfig::replicates)
        .def_readwrite("epsilon", &ExperimentConfig::epsilon)
        .def_readwrite("estimators", &ExperimentConfig::estimators)
        .def_readwrite("base_seed", &ExperimentConfig::base_seed)
        .def_readwrite("horizon_cap", &ExperimentConfig::horizon_cap)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_readwrite("shared_batch", &ExperimentConfig::shared_batch)
        .def_readwrite("plot_data", &ExperimentConfig::plot_data);

    py::class_<ResultRow>(m, "ResultRow")
        .def_readonly("domain_size", &ResultRow::domain_size)
        .def_readonly("n", &ResultRow::n)
        .def_readonly("replicate", &ResultRow::replicate)
        .def_readonly("estimator", &ResultRow::estimator)
        .def_readonly("estimate", &ResultRow::estimate)
        .def_readonly("true_return", &ResultRow::true_return)
        .def_readonly("squared_error", &ResultRow::squared_error)
        .def_readonly("chosen_set", &ResultRow::chosen_set)
        .def_readonly("seed", &ResultRow::seed)
        .def_readonly("failed", &ResultRow::failed);

    py::class_<AggregateRow>(m, "AggregateRow")
        .def_readonly("domain_size", &AggregateRow::domain_size)
        .def_readonly("n", &AggregateRow::n)
        .def_readonly("estimator", &AggregateRow::estimator)
        .def_readonly("mse", &AggregateRow::mse)
        .def_readonly("mean_estimate", &AggregateRow::mean_estimate)
        .def_readonly("std_error", &AggregateRow::std_error)
        .def_readonly("true_return", &AggregateRow::true_return);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("rows", &ExperimentResult::rows)
        .def_readonly("table", &ExperimentResult::table)
        .def("rows_csv",
             [](const ExperimentResult& result) {
                 std::ostringstream out;
                 write_rows_csv(result.rows, out);
                 return out.str();
             })
        .def("mse_table_csv", [](const ExperimentResult& result) {
            std::ostringstream out;
            write_mse_table_csv(result.table, out);
            return out.str();
        });

    m.def("replicate_seed", &replicate_seed, py::arg("base_seed"), py::arg("bound"),
          py::arg("n"), py::arg("replicate"));
    m.def("run_experiment", &run_experiment, py::arg("config"));
    m.def("write_experiment_outputs", &write_experiment_outputs, py::arg("config"),
          py::arg("result"));
}
