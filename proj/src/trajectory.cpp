#include "sisope/trajectory.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "sisope/format.hpp"
#include "sisope/rng.hpp"

namespace sisope {

namespace {

/// Inverse-CDF draw in index order; deterministic given the uniform variate.
/// Accumulated roundoff can leave u above the final cumulative sum, in which
/// case the last positive-probability index is returned.
int draw_categorical(std::span<const double> probs, double u) {
    double cum = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        cum += probs[i];
        if (u < cum) return last_positive;
    }
    return last_positive;
}

} // namespace

double Trajectory::total_return() const {
    double g = 0.0;
    for (const auto& step : steps) g += step.reward;
    return g;
}

Trajectory sample_trajectory(const TabularMdp& mdp, const TabularPolicy& policy,
                             std::uint64_t seed) {
    if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions())
        throw std::invalid_argument("policy shape does not match MDP");

    SplitMix64 rng(seed);
    Trajectory traj;
    traj.seed = seed;

    int s = draw_categorical(mdp.start_distribution(), rng.next_double());
    for (int t = 0; t < mdp.horizon_cap(); ++t) {
        const int a = draw_categorical(policy.row(s), rng.next_double());
        const int s2 = draw_categorical(mdp.transition_row(s, a), rng.next_double());
        traj.steps.push_back({s, a, mdp.reward(s, a, s2)});
        if (mdp.is_terminal(s2)) {
            traj.terminated = true;
            break;
        }
        s = s2;
    }
    traj.truncated = !traj.terminated;
    return traj;
}

TrajectoryBatch sample_batch(const TabularMdp& mdp, const TabularPolicy& policy, int n,
                             std::uint64_t base_seed) {
    if (n < 1) throw std::invalid_argument("batch size must be >= 1");
    TrajectoryBatch batch;
    batch.base_seed = base_seed;
    batch.trajectories.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        batch.trajectories.push_back(
            sample_trajectory(mdp, policy, base_seed + static_cast<std::uint64_t>(i)));
    return batch;
}

std::string to_jsonl_line(const Trajectory& trajectory) {
    // Hand-rolled serialization keeps float formatting (shortest round-trip)
    // and key order stable, so logs are byte-reproducible.
    std::string out = "{\"seed\": " + std::to_string(trajectory.seed) +
                      ", \"terminated\": " + (trajectory.terminated ? "true" : "false") +
                      ", \"steps\": [";
    for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
        const auto& step = trajectory.steps[i];
        if (i > 0) out += ", ";
        out += "[" + std::to_string(step.state) + ", " + std::to_string(step.action) + ", " +
               format_double(step.reward) + "]";
    }
    out += "]}";
    return out;
}

Trajectory from_jsonl_line(const std::string& line) {
    const auto parsed = nlohmann::json::parse(line);
    if (!parsed.is_object() || !parsed.contains("seed") || !parsed.contains("terminated") ||
        !parsed.contains("steps"))
        throw std::invalid_argument("episode line missing seed/terminated/steps");

    Trajectory traj;
    traj.seed = parsed.at("seed").get<std::uint64_t>();
    traj.terminated = parsed.at("terminated").get<bool>();
    traj.truncated = !traj.terminated;
    for (const auto& entry : parsed.at("steps")) {
        if (!entry.is_array() || entry.size() != 3)
            throw std::invalid_argument("episode step must be [state, action, reward]");
        traj.steps.push_back({entry.at(0).get<int>(), entry.at(1).get<int>(),
                              entry.at(2).get<double>()});
    }
    if (traj.steps.empty()) throw std::invalid_argument("episode has no steps");
    return traj;
}

void write_jsonl(const TrajectoryBatch& batch, std::ostream& out) {
    for (const auto& traj : batch.trajectories) out << to_jsonl_line(traj) << '\n';
}

TrajectoryBatch read_jsonl(std::istream& in) {
    TrajectoryBatch batch;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        batch.trajectories.push_back(from_jsonl_line(line));
    }
    if (!batch.trajectories.empty()) batch.base_seed = batch.trajectories.front().seed;
    return batch;
}

}  // namespace sisope
