// Command-line front end: ground-truth values, episode sampling, one-shot
// estimates, negligible-set search, the benchmark sweep, and enumeration
// cross-checks. Subcommands print machine-readable output (JSON or CSV) on
// stdout; progress and summaries go to stderr.
//
// Exit codes: 0 success; CLI11's own codes for usage errors; 2 invalid
// configuration or model; 3 file I/O failure; 4 enumeration budget refusal;
// 5 behaviour-policy support violation.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sisope/errors.hpp"
#include "sisope/estimators.hpp"
#include "sisope/experiment.hpp"
#include "sisope/format.hpp"
#include "sisope/lift_domain.hpp"
#include "sisope/oracle.hpp"
#include "sisope/search.hpp"
#include "sisope/trajectory.hpp"

namespace {

using namespace sisope;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitBudget = 4;
constexpr int kExitSupport = 5;

struct DomainOpts {
    std::string domain = "deterministic";
    int bound = 3;
    double noise = 0.1;
    double policy_noise = -1.0;
    int horizon = 100;
};

void add_domain_options(CLI::App* cmd, DomainOpts& opts) {
    cmd->add_option("--domain", opts.domain, "corridor variant")
        ->check(CLI::IsMember({"deterministic", "det", "stochastic", "stoch"}))
        ->capture_default_str();
    cmd->add_option("--bound", opts.bound, "corridor half-width, >= 3")->capture_default_str();
    cmd->add_option("--noise", opts.noise, "slip probability (stochastic variant only)")
        ->capture_default_str();
    cmd->add_option("--policy-noise", opts.policy_noise,
                    "evaluation-policy slip; negative tracks --noise")
        ->capture_default_str();
    cmd->add_option("--horizon", opts.horizon, "episode length cap")->capture_default_str();
}

bool is_deterministic(const std::string& domain) {
    return domain == "deterministic" || domain == "det";
}

DomainBundle build_domain(const DomainOpts& opts) {
    LiftDomainSpec spec;
    spec.bound = opts.bound;
    spec.noise = is_deterministic(opts.domain) ? 0.0 : opts.noise;
    spec.policy_noise = opts.policy_noise;
    spec.horizon_cap = opts.horizon;
    return build_lift_domain(spec);
}

/// "none", "all" (non-terminal), "lift", or explicit indices like "2;4".
std::vector<int> parse_drop_set(const std::string& text, const DomainBundle& bundle) {
    if (text == "none") return {};
    if (text == "all") return bundle.mdp.non_terminal_states();
    if (text == "lift") return bundle.lift_states;
    std::vector<int> out;
    std::string token;
    std::stringstream stream(text);
    const char delimiter = text.find(';') != std::string::npos ? ';' : ',';
    while (std::getline(stream, token, delimiter)) {
        if (token.empty()) continue;
        out.push_back(std::stoi(token));
    }
    return out;
}

TrajectoryBatch load_or_sample(const std::string& in_path, const DomainBundle& bundle,
                               const std::string& policy, int n, std::uint64_t seed) {
    if (!in_path.empty()) {
        if (in_path == "-") return read_jsonl(std::cin);
        std::ifstream in(in_path);
        if (!in) throw std::runtime_error("cannot open " + in_path);
        return read_jsonl(in);
    }
    const auto& pi = policy == "eval" ? bundle.eval_policy : bundle.behaviour_policy;
    return sample_batch(bundle.mdp, pi, n, seed);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"off-policy evaluation with state-dropping importance sampling"};
    app.require_subcommand(1);

    // --- truth ---------------------------------------------------------
    DomainOpts truth_opts;
    bool truth_json = false;
    double scan_target = 0.0;
    std::string export_mdp_path;
    auto* truth_cmd = app.add_subcommand("truth", "exact evaluation-policy return (DP)");
    add_domain_options(truth_cmd, truth_opts);
    truth_cmd->add_flag("--json", truth_json, "print the full report as JSON");
    auto* scan_opt = truth_cmd->add_option(
        "--scan-target", scan_target,
        "instead: scan noise levels and report the one whose return is closest");
    truth_cmd->add_option("--export-mdp", export_mdp_path, "also write the dense MDP as JSON");

    // --- sample --------------------------------------------------------
    DomainOpts sample_opts;
    int sample_n = 1000;
    std::uint64_t sample_seed = 0;
    std::string sample_policy = "behaviour";
    std::string sample_out = "-";
    auto* sample_cmd = app.add_subcommand("sample", "sample an episode batch as JSONL");
    add_domain_options(sample_cmd, sample_opts);
    sample_cmd->add_option("--n", sample_n, "number of episodes")->capture_default_str();
    sample_cmd->add_option("--seed", sample_seed, "base seed; episode i uses seed + i")
        ->capture_default_str();
    sample_cmd->add_option("--policy", sample_policy, "behaviour|eval")
        ->check(CLI::IsMember({"behaviour", "eval"}))
        ->capture_default_str();
    sample_cmd->add_option("--out", sample_out, "output path, '-' for stdout")
        ->capture_default_str();

    // --- eval ----------------------------------------------------------
    DomainOpts eval_opts;
    std::string eval_estimator = "is";
    std::string eval_drop = "none";
    std::string eval_in;
    int eval_n = 1000;
    std::uint64_t eval_seed = 0;
    double eval_epsilon = 0.01;
    auto* eval_cmd = app.add_subcommand("eval", "run one estimator on a batch");
    add_domain_options(eval_cmd, eval_opts);
    eval_cmd->add_option("--estimator", eval_estimator, "is|pdis|incris|sis")
        ->check(CLI::IsMember({"is", "pdis", "incris", "sis"}))
        ->capture_default_str();
    eval_cmd->add_option("--drop", eval_drop,
                         "sis drop set: none|all|lift|auto|indices like 2;4")
        ->capture_default_str();
    eval_cmd->add_option("--in", eval_in, "episode JSONL ('-' for stdin); else sample fresh");
    eval_cmd->add_option("--n", eval_n, "batch size when sampling")->capture_default_str();
    eval_cmd->add_option("--seed", eval_seed, "base seed when sampling")->capture_default_str();
    eval_cmd->add_option("--epsilon", eval_epsilon, "threshold for --drop auto")
        ->capture_default_str();

    // --- search --------------------------------------------------------
    DomainOpts search_opts;
    std::string search_in;
    int search_n = 1000;
    std::uint64_t search_seed = 0;
    double search_epsilon = 0.01;
    int search_max_card = 2;
    bool search_split = false;
    std::string search_out = "-";
    auto* search_cmd =
        app.add_subcommand("search", "negligible-set search; prints the diagnostics CSV");
    add_domain_options(search_cmd, search_opts);
    search_cmd->add_option("--in", search_in, "episode JSONL ('-' for stdin); else sample fresh");
    search_cmd->add_option("--n", search_n, "batch size when sampling")->capture_default_str();
    search_cmd->add_option("--seed", search_seed, "base seed when sampling")
        ->capture_default_str();
    search_cmd->add_option("--epsilon", search_epsilon, "negligibility threshold")
        ->capture_default_str();
    search_cmd->add_option("--max-card", search_max_card, "largest candidate set size")
        ->capture_default_str();
    search_cmd->add_flag("--split", search_split, "screen on first half, estimate on second");
    search_cmd->add_option("--out", search_out, "diagnostics CSV path, '-' for stdout")
        ->capture_default_str();

    // --- experiment ----------------------------------------------------
    ExperimentConfig exp_config;
    bool exp_independent = false;
    auto* exp_cmd = app.add_subcommand("experiment", "full benchmark sweep; writes CSV files");
    exp_cmd->set_config("--config", "", "TOML config; command-line options override it");
    exp_cmd->add_option("--domain", exp_config.domain, "deterministic|stochastic")
        ->check(CLI::IsMember({"deterministic", "stochastic"}))
        ->capture_default_str();
    exp_cmd->add_option("--bounds", exp_config.bounds, "corridor half-widths to sweep")
        ->capture_default_str();
    exp_cmd->add_option("--noise", exp_config.noise, "slip (stochastic domain)")
        ->capture_default_str();
    exp_cmd->add_option("--policy-noise", exp_config.policy_noise,
                        "evaluation-policy slip; negative tracks the effective slip")
        ->capture_default_str();
    exp_cmd->add_option("--batch-sizes", exp_config.batch_sizes, "episodes per batch, swept")
        ->capture_default_str();
    exp_cmd->add_option("--replicates", exp_config.replicates, "independent batches per cell")
        ->capture_default_str();
    exp_cmd->add_option("--epsilon", exp_config.epsilon, "search threshold")
        ->capture_default_str();
    exp_cmd->add_option("--estimators", exp_config.estimators,
                        "subset of is pdis incris sis_lift sis_search")
        ->capture_default_str();
    exp_cmd->add_option("--base-seed", exp_config.base_seed, "sweep-level seed")
        ->capture_default_str();
    exp_cmd->add_option("--horizon", exp_config.horizon_cap, "episode length cap")
        ->capture_default_str();
    exp_cmd->add_option("--outdir", exp_config.output_dir, "output directory")
        ->capture_default_str();
    exp_cmd->add_flag("--independent-batches", exp_independent,
                      "sample a fresh batch per estimator instead of sharing");
    exp_cmd->add_flag("--plot-data", exp_config.plot_data, "also write plot_data.csv");

    // --- oracle --------------------------------------------------------
    DomainOpts oracle_opts;
    std::string oracle_drop = "lift";
    int oracle_max_len = 12;
    std::uint64_t oracle_budget = 10'000'000;
    int oracle_n = 1000;
    auto* oracle_cmd =
        app.add_subcommand("oracle", "exact moments by exhaustive enumeration, as JSON");
    add_domain_options(oracle_cmd, oracle_opts);
    oracle_cmd->add_option("--drop", oracle_drop, "none|all|lift|indices like 2;4")
        ->capture_default_str();
    oracle_cmd->add_option("--max-len", oracle_max_len, "enumeration depth")
        ->capture_default_str();
    oracle_cmd->add_option("--budget", oracle_budget, "node budget before refusing")
        ->capture_default_str();
    oracle_cmd->add_option("--n", oracle_n, "batch size for the derived estimator stats")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (truth_cmd->parsed()) {
            if (*scan_opt) {
                const auto point = scan_noise_for_return(truth_opts.bound, truth_opts.horizon,
                                                         scan_target);
                std::cout << nlohmann::json{{"noise", point.noise},
                                            {"true_return", point.true_return},
                                            {"abs_error", point.abs_error}}
                                 .dump()
                          << '\n';
                return 0;
            }
            const auto bundle = build_domain(truth_opts);
            if (!export_mdp_path.empty()) {
                auto out = open_output(export_mdp_path);
                out << mdp_to_json(bundle.mdp).dump(2) << '\n';
            }
            const auto report = true_return_dp(bundle.mdp, bundle.eval_policy);
            if (truth_json)
                std::cout << nlohmann::json{{"true_return", report.true_return},
                                            {"horizon_used", report.horizon_used},
                                            {"truncation_mass", report.truncation_mass}}
                                 .dump()
                          << '\n';
            else
                std::cout << format_double(report.true_return) << '\n';
            return 0;
        }

        if (sample_cmd->parsed()) {
            const auto bundle = build_domain(sample_opts);
            const auto& pi =
                sample_policy == "eval" ? bundle.eval_policy : bundle.behaviour_policy;
            const auto batch = sample_batch(bundle.mdp, pi, sample_n, sample_seed);
            if (sample_out == "-") {
                write_jsonl(batch, std::cout);
            } else {
                auto out = open_output(sample_out);
                write_jsonl(batch, out);
            }
            return 0;
        }

        if (eval_cmd->parsed()) {
            const auto bundle = build_domain(eval_opts);
            const auto batch =
                load_or_sample(eval_in, bundle, "behaviour", eval_n, eval_seed);
            EstimateReport report;
            if (eval_estimator == "is") {
                report = estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy);
            } else if (eval_estimator == "pdis") {
                report = estimate_pdis(batch, bundle.eval_policy, bundle.behaviour_policy);
            } else if (eval_estimator == "incris") {
                report = estimate_incris(batch, bundle.eval_policy, bundle.behaviour_policy);
            } else if (eval_drop == "auto") {
                SearchConfig config;
                config.epsilon = eval_epsilon;
                config.candidate_states = bundle.mdp.non_terminal_states();
                const auto found = search_negligible_set(batch, bundle.eval_policy,
                                                         bundle.behaviour_policy, config);
                report = estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy,
                                      found.best_set);
                report.extra["search_mse_hat"] = found.best_mse_hat;
            } else {
                report = estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy,
                                      parse_drop_set(eval_drop, bundle));
            }
            std::cout << report.to_json().dump() << '\n';
            return 0;
        }

        if (search_cmd->parsed()) {
            const auto bundle = build_domain(search_opts);
            const auto batch =
                load_or_sample(search_in, bundle, "behaviour", search_n, search_seed);
            SearchConfig config;
            config.epsilon = search_epsilon;
            config.max_cardinality = search_max_card;
            config.split_batch = search_split;
            config.candidate_states = bundle.mdp.non_terminal_states();
            const auto result =
                search_negligible_set(batch, bundle.eval_policy, bundle.behaviour_policy, config);
            if (search_out == "-") {
                write_diagnostics_csv(result, std::cout);
            } else {
                auto out = open_output(search_out);
                write_diagnostics_csv(result, out);
            }
            std::cerr << nlohmann::json{{"best_set", result.best_set},
                                        {"best_mse_hat", result.best_mse_hat},
                                        {"estimate", result.estimate}}
                             .dump()
                      << '\n';
            return 0;
        }

        if (exp_cmd->parsed()) {
            exp_config.shared_batch = !exp_independent;
            const auto result = run_experiment(exp_config);
            write_experiment_outputs(exp_config, result);
            std::cerr << "wrote " << result.rows.size() << " rows to " << exp_config.output_dir
                      << "/rows.csv (+ mse_table.csv" << (exp_config.plot_data ? ", plot_data.csv" : "")
                      << ")\n";
            return 0;
        }

        if (oracle_cmd->parsed()) {
            const auto bundle = build_domain(oracle_opts);
            const auto dropped = parse_drop_set(oracle_drop, bundle);
            const auto moments =
                enumerate_moments(bundle.mdp, bundle.eval_policy, bundle.behaviour_policy,
                                  dropped, oracle_max_len, oracle_budget);
            const auto stats = exact_estimator_stats(moments, oracle_n);
            const auto dp = true_return_dp(bundle.mdp, bundle.eval_policy);
            std::cout << nlohmann::json{{"dropped", dropped},
                                        {"e_a", moments.e_a},
                                        {"e_bg", moments.e_bg},
                                        {"e_abg", moments.e_abg},
                                        {"cov_a_bg", moments.cov_a_bg},
                                        {"var_bg_single", moments.var_bg_single},
                                        {"mse_sis_single", moments.mse_sis_single},
                                        {"leaf_mass", moments.leaf_mass},
                                        {"nodes", moments.nodes},
                                        {"n", oracle_n},
                                        {"bias_n", stats.bias},
                                        {"variance_n", stats.variance},
                                        {"mse_n", stats.mse},
                                        {"dp_true_return", dp.true_return},
                                        {"dp_truncation_mass", dp.truncation_mass}}
                             .dump()
                      << '\n';
            return 0;
        }
    } catch (const SupportViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSupport;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
