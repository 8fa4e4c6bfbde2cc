#include "sisope/search.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "sisope/format.hpp"

namespace sisope {

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Noise floors for the two negligibility statistics: the standard error of
/// the dropped-product mean and (first-order) of the sample covariance.
/// Candidates are rejected only when a deviation exceeds both epsilon and
/// z_gate times its own standard error, i.e. when the batch actually
/// provides evidence against negligibility. With a fixed threshold alone,
/// both statistics fluctuate at the 1/sqrt(n) scale and eligibility of a
/// genuinely negligible set would be decided by sampling luck.
constexpr double z_gate = 2.0;

struct GateFloors {
    double se_mean_a = 0.0;
    double se_cov = 0.0;
};

GateFloors gate_floors(const WeightDecomposition& decomp, double mean_a) {
    const auto n = decomp.a_weights.size();
    GateFloors floors;
    if (n < 2) return floors;
    const double nd = static_cast<double>(n);
    double mean_x = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_x += decomp.b_weights[i] * decomp.returns[i];
    mean_x /= nd;
    std::vector<double> u(n);
    double var_a = 0.0;
    double mean_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = decomp.a_weights[i] - mean_a;
        const double dx = decomp.b_weights[i] * decomp.returns[i] - mean_x;
        var_a += da * da;
        u[i] = da * dx;
        mean_u += u[i];
    }
    var_a /= (nd - 1.0);
    mean_u /= nd;
    double var_u = 0.0;
    for (double v : u) var_u += (v - mean_u) * (v - mean_u);
    var_u /= (nd - 1.0);
    floors.se_mean_a = std::sqrt(var_a / nd);
    floors.se_cov = std::sqrt(var_u / nd);
    return floors;
}

/// Advances `combo` (indices into a pool of `pool_size` items) to the next
/// combination in lexicographic order; false when exhausted.
bool next_combination(std::vector<int>& combo, int pool_size) {
    const int cardinality = static_cast<int>(combo.size());
    for (int i = cardinality - 1; i >= 0; --i) {
        if (combo[static_cast<std::size_t>(i)] < pool_size - (cardinality - i)) {
            ++combo[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < cardinality; ++j)
                combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

SearchResult search_negligible_set(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                                   const TabularPolicy& pi_b, const SearchConfig& config) {
    if (config.epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
    if (config.max_cardinality < 0) throw std::invalid_argument("max_cardinality must be >= 0");

    std::vector<int> candidates;
    if (config.candidate_states.has_value()) {
        candidates = *config.candidate_states;
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (int s : candidates)
            if (s < 0 || s >= pi_e.num_states())
                throw std::invalid_argument("candidate state " + std::to_string(s) +
                                            " out of range");
    } else {
        candidates.resize(static_cast<std::size_t>(pi_e.num_states()));
        for (int s = 0; s < pi_e.num_states(); ++s) candidates[static_cast<std::size_t>(s)] = s;
    }
    if (config.max_cardinality > static_cast<int>(candidates.size()))
        throw std::invalid_argument("max_cardinality exceeds the candidate universe");

    const int n = batch.size();
    const int min_n = config.split_batch ? 4 : 2;
    if (n < min_n)
        throw std::invalid_argument("search needs at least " + std::to_string(min_n) +
                                    " trajectories");

    // Optionally decouple selection from estimation: screen on the first
    // half, estimate on the second.
    TrajectoryBatch screen_half;
    TrajectoryBatch estimate_half;
    const TrajectoryBatch* screen = &batch;
    const TrajectoryBatch* estimate_on = &batch;
    if (config.split_batch) {
        const auto half = static_cast<std::size_t>(n / 2);
        screen_half.base_seed = batch.base_seed;
        screen_half.trajectories.assign(batch.trajectories.begin(),
                                        batch.trajectories.begin() + half);
        estimate_half.base_seed = batch.base_seed;
        estimate_half.trajectories.assign(batch.trajectories.begin() + half,
                                          batch.trajectories.end());
        screen = &screen_half;
        estimate_on = &estimate_half;
    }

    SearchResult result;

    // The empty set is always eligible: its dropped product is identically 1,
    // so the search can never do worse than plain importance sampling by more
    // than the (1 + epsilon) preference slack.
    const auto base = empirical_mse_hat(decompose_weights(*screen, pi_e, pi_b, {}));
    result.diagnostics.push_back({{}, 1.0, 0.0, base.mse_hat, true});
    result.best_set = {};
    result.best_mse_hat = base.mse_hat;
    int best_cardinality = 0;

    for (int cardinality = 1; cardinality <= config.max_cardinality; ++cardinality) {
        std::vector<int> combo(static_cast<std::size_t>(cardinality));
        for (int i = 0; i < cardinality; ++i) combo[static_cast<std::size_t>(i)] = i;
        do {
            std::vector<int> dropped(static_cast<std::size_t>(cardinality));
            for (int i = 0; i < cardinality; ++i)
                dropped[static_cast<std::size_t>(i)] =
                    candidates[static_cast<std::size_t>(combo[static_cast<std::size_t>(i)])];
            const auto decomp = decompose_weights(*screen, pi_e, pi_b, dropped);
            const auto scores = empirical_mse_hat(decomp);
            const double mean_a = mean_of(decomp.a_weights);
            const auto floors = gate_floors(decomp, mean_a);
            const bool eligible =
                std::abs(mean_a - 1.0) < std::max(config.epsilon, z_gate * floors.se_mean_a) &&
                std::abs(scores.cov_hat) < std::max(config.epsilon, z_gate * floors.se_cov);
            result.diagnostics.push_back(
                {dropped, mean_a, scores.cov_hat, scores.mse_hat, eligible});

            if (!eligible) continue;
            const bool better = scores.mse_hat < result.best_mse_hat;
            const bool near_tie_larger =
                scores.mse_hat < result.best_mse_hat * (1.0 + config.epsilon) &&
                cardinality > best_cardinality;
            if (better || near_tie_larger) {
                result.best_set = dropped;
                result.best_mse_hat = scores.mse_hat;
                best_cardinality = cardinality;
            }
        } while (next_combination(combo, static_cast<int>(candidates.size())));
    }

    result.estimate = estimate_sis(*estimate_on, pi_e, pi_b, result.best_set).estimate;
    return result;
}

void write_diagnostics_csv(const SearchResult& result, std::ostream& out) {
    out << "set,mean_a,cov_hat,mse_hat,eligible\n";
    for (const auto& diag : result.diagnostics) {
        out << join_ints(diag.dropped, ';') << ',' << format_double(diag.mean_a) << ','
            << format_double(diag.cov_hat) << ',' << format_double(diag.mse_hat) << ','
            << (diag.eligible ? "true" : "false") << '\n';
    }
}

}  // namespace sisope
