#include "sisope/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sisope/errors.hpp"

namespace sisope {

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Unbiased (n-1) sample variance; 0 when fewer than 2 points.
double sample_variance(const std::vector<double>& xs) {
    const auto n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(n - 1);
}

/// Unbiased (n-1) sample covariance; 0 when fewer than 2 points.
double sample_covariance(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = xs.size();
    if (n < 2) return 0.0;
    const double mx = mean_of(xs);
    const double my = mean_of(ys);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (xs[i] - mx) * (ys[i] - my);
    return acc / static_cast<double>(n - 1);
}

int count_truncated(const TrajectoryBatch& batch) {
    int count = 0;
    for (const auto& traj : batch.trajectories) count += traj.truncated ? 1 : 0;
    return count;
}

void require_nonempty(const TrajectoryBatch& batch) {
    if (batch.trajectories.empty()) throw std::invalid_argument("batch has no trajectories");
}

EstimateReport make_report(std::string name, std::vector<double> contributions,
                           const TrajectoryBatch& batch) {
    EstimateReport report;
    report.estimator_name = std::move(name);
    report.estimate = mean_of(contributions);
    report.estimator_variance_hat =
        sample_variance(contributions) / static_cast<double>(contributions.size());
    report.num_truncated = count_truncated(batch);
    report.per_trajectory_contributions = std::move(contributions);
    return report;
}

} // namespace

nlohmann::json EstimateReport::to_json() const {
    return nlohmann::json{{"estimator_name", estimator_name},
                          {"estimate", estimate},
                          {"estimator_variance_hat", estimator_variance_hat},
                          {"n", per_trajectory_contributions.size()},
                          {"num_truncated", num_truncated},
                          {"extra", extra}};
}

EstimateReport estimate_is(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                           const TabularPolicy& pi_b) {
    require_nonempty(batch);
    std::vector<double> contributions;
    contributions.reserve(batch.trajectories.size());
    for (const auto& traj : batch.trajectories) {
        double weight = 1.0;
        for (const auto& step : traj.steps)
            weight *= action_ratio(pi_e, pi_b, step.state, step.action);
        contributions.push_back(weight * traj.total_return());
    }
    return make_report("is", std::move(contributions), batch);
}

EstimateReport estimate_pdis(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                             const TabularPolicy& pi_b) {
    require_nonempty(batch);
    std::vector<double> contributions;
    contributions.reserve(batch.trajectories.size());
    for (const auto& traj : batch.trajectories) {
        double weight = 1.0;
        double sum = 0.0;
        for (const auto& step : traj.steps) {
            weight *= action_ratio(pi_e, pi_b, step.state, step.action);
            sum += weight * step.reward;
        }
        contributions.push_back(sum);
    }
    return make_report("pdis", std::move(contributions), batch);
}

EstimateReport estimate_incris(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                               const TabularPolicy& pi_b) {
    require_nonempty(batch);
    const auto n = batch.trajectories.size();
    const double nd = static_cast<double>(n);

    // Per-trajectory step ratios and their prefix products (prefix[0] = 1).
    // Steps beyond a trajectory's end behave as ratio 1, reward 0.
    std::size_t max_len = 0;
    std::vector<std::vector<double>> ratios(n);
    std::vector<std::vector<double>> prefix(n);
    // Smallest admissible window size. Dropping the prefix rho_{1:t-k} is
    // treated like dropping a state in SIS: admissible only if the dropped
    // factor is never exactly zero on a trajectory still alive at step t. A
    // zero prefix is one the evaluation policy cannot produce at all, so it
    // is categorically non-negligible; truncations that would discard such a
    // prefix (or, equivalently, revive a zero-weight trajectory) are
    // rejected. Windows of size k fail for trajectory i exactly when
    // k <= length_i - first_zero_i.
    std::size_t min_k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& steps = batch.trajectories[i].steps;
        ratios[i].reserve(steps.size());
        prefix[i].assign(1, 1.0);
        double running = 1.0;
        std::size_t first_zero = 0; // 1-based; 0 when the trajectory has none
        for (const auto& step : steps) {
            const double rho = action_ratio(pi_e, pi_b, step.state, step.action);
            ratios[i].push_back(rho);
            running *= rho;
            prefix[i].push_back(running);
            if (rho == 0.0 && first_zero == 0) first_zero = ratios[i].size();
        }
        if (first_zero > 0) min_k = std::max(min_k, steps.size() - first_zero + 1);
        max_len = std::max(max_len, steps.size());
    }
    const auto T = max_len;

    // window[i][t] holds the product of the k most recent ratios ending at
    // step t for the window size currently under evaluation; column t of the
    // per-step contribution is window * r_t.
    std::vector<std::vector<double>> window(n, std::vector<double>(T, 1.0));
    std::vector<double> contributions(n, 0.0);
    std::vector<double> col_a(n), col_x(n);
    std::vector<double> best_contributions;

    int best_k = 0;
    double best_mse = 0.0;
    bool have_best = false;

    for (std::size_t k = min_k; k <= T; ++k) {
        // Zero-aware sliding window: track the product of non-zero entries
        // plus a zero count, so a vanished ratio leaving the window does not
        // poison later products.
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rho = ratios[i];
            const auto len = rho.size();
            double prod = 1.0;
            std::size_t zeros = 0;
            double sum = 0.0;
            for (std::size_t t = 0; t < len; ++t) {
                if (k > 0) {
                    if (rho[t] == 0.0)
                        ++zeros;
                    else
                        prod *= rho[t];
                    if (t >= k) {
                        if (rho[t - k] == 0.0)
                            --zeros;
                        else
                            prod /= rho[t - k];
                    }
                }
                const double w = (k == 0) ? 1.0 : (zeros > 0 ? 0.0 : prod);
                window[i][t] = w;
                sum += w * batch.trajectories[i].steps[t].reward;
            }
            contributions[i] = sum;
        }

        // Estimated squared bias: per time step, the dropped prefix has
        // expectation 1, so the bias of dropping it is (minus) the covariance
        // between the dropped prefix and the kept contribution.
        double bias_hat = 0.0;
        if (n >= 2) {
            for (std::size_t t = k; t < T; ++t) {
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& steps = batch.trajectories[i].steps;
                    const std::size_t cut = std::min(t + 1 - k, steps.size());
                    col_a[i] = prefix[i][cut];
                    col_x[i] = t < steps.size() ? window[i][t] * steps[t].reward : 0.0;
                }
                bias_hat += sample_covariance(col_a, col_x);
            }
        }

        const double mse = sample_variance(contributions) / nd + bias_hat * bias_hat;
        // Ties go to the larger k: less dropping, less bias. At k = T the
        // estimate is exactly PDIS.
        if (!have_best || std::isnan(best_mse) || mse <= best_mse) {
            have_best = true;
            best_mse = mse;
            best_k = static_cast<int>(k);
            best_contributions = contributions;
        }
    }

    auto report = make_report("incris", std::move(best_contributions), batch);
    report.extra = nlohmann::json{
        {"k", best_k}, {"mse_hat", best_mse}, {"admissible_min_k", min_k}};
    return report;
}

WeightDecomposition decompose_weights(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                                      const TabularPolicy& pi_b,
                                      const std::vector<int>& dropped_states) {
    require_nonempty(batch);
    WeightDecomposition decomp;
    decomp.dropped_set = dropped_states;
    std::sort(decomp.dropped_set.begin(), decomp.dropped_set.end());
    decomp.dropped_set.erase(std::unique(decomp.dropped_set.begin(), decomp.dropped_set.end()),
                             decomp.dropped_set.end());

    std::vector<char> dropped_mask(static_cast<std::size_t>(pi_e.num_states()), 0);
    for (int s : decomp.dropped_set) {
        if (s < 0 || s >= pi_e.num_states())
            throw std::invalid_argument("dropped state " + std::to_string(s) + " out of range");
        dropped_mask[static_cast<std::size_t>(s)] = 1;
    }

    const auto n = batch.trajectories.size();
    decomp.a_weights.reserve(n);
    decomp.b_weights.reserve(n);
    decomp.returns.reserve(n);
    decomp.retained_visits.reserve(n);
    for (const auto& traj : batch.trajectories) {
        double a_weight = 1.0;
        double b_weight = 1.0;
        int retained = 0;
        for (const auto& step : traj.steps) {
            const double rho = action_ratio(pi_e, pi_b, step.state, step.action);
            if (dropped_mask[static_cast<std::size_t>(step.state)]) {
                a_weight *= rho;
            } else {
                b_weight *= rho;
                ++retained;
            }
        }
        decomp.a_weights.push_back(a_weight);
        decomp.b_weights.push_back(b_weight);
        decomp.returns.push_back(traj.total_return());
        decomp.retained_visits.push_back(retained);
    }
    return decomp;
}

EstimateReport estimate_sis(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                            const TabularPolicy& pi_b, const std::vector<int>& dropped_states) {
    const auto decomp = decompose_weights(batch, pi_e, pi_b, dropped_states);
    std::vector<double> contributions;
    contributions.reserve(decomp.a_weights.size());
    for (std::size_t i = 0; i < decomp.b_weights.size(); ++i)
        contributions.push_back(decomp.b_weights[i] * decomp.returns[i]);
    auto report = make_report("sis", std::move(contributions), batch);
    report.extra = nlohmann::json{{"dropped", decomp.dropped_set}};
    return report;
}

MseHat empirical_mse_hat(const WeightDecomposition& decomp) {
    if (decomp.size() < 2)
        throw std::invalid_argument("empirical_mse_hat needs at least 2 trajectories");
    std::vector<double> bg;
    bg.reserve(decomp.b_weights.size());
    for (std::size_t i = 0; i < decomp.b_weights.size(); ++i)
        bg.push_back(decomp.b_weights[i] * decomp.returns[i]);

    MseHat out;
    out.var_hat = sample_variance(bg) / static_cast<double>(decomp.size());
    out.cov_hat = sample_covariance(decomp.a_weights, bg);
    out.mse_hat = out.var_hat + out.cov_hat * out.cov_hat;
    return out;
}

BoundReport variance_upper_bound(const TrajectoryBatch& batch, const TabularPolicy& pi_e,
                                 const TabularPolicy& pi_b, double r_max, int h,
                                 const std::vector<int>& retained_states) {
    require_nonempty(batch);
    if (r_max < 0.0) throw std::invalid_argument("r_max must be >= 0");
    if (h < 1) throw std::invalid_argument("horizon h must be >= 1");

    std::vector<char> retained_mask(static_cast<std::size_t>(pi_e.num_states()), 0);
    double rho_max = 0.0;
    for (int s : retained_states) {
        if (s < 0 || s >= pi_e.num_states())
            throw std::invalid_argument("retained state " + std::to_string(s) + " out of range");
        retained_mask[static_cast<std::size_t>(s)] = 1;
        for (int a = 0; a < pi_e.num_actions(); ++a) {
            if (pi_b.prob(s, a) > 0.0) {
                rho_max = std::max(rho_max, pi_e.prob(s, a) / pi_b.prob(s, a));
            } else if (pi_e.prob(s, a) > 0.0) {
                // Ratio at a retained state would be unbounded.
                throw SupportViolation(s, a);
            }
        }
    }

    int m_b = 0;
    for (const auto& traj : batch.trajectories) {
        int visits = 0;
        for (const auto& step : traj.steps)
            visits += retained_mask[static_cast<std::size_t>(step.state)] ? 1 : 0;
        m_b = std::max(m_b, visits);
    }

    BoundReport report;
    report.rho_max = rho_max;
    report.m_b = m_b;
    report.r_max = r_max;
    report.h = h;
    const double range = h * r_max * std::pow(rho_max, m_b);
    report.bound = range * range / 4.0;
    return report;
}

}  // namespace sisope
