#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sisope/mdp.hpp"

namespace sisope {

struct TrajectoryStep {
    int state;
    int action;
    double reward;

    bool operator==(const TrajectoryStep&) const = default;
};

/// One sampled episode. Steps never contain a terminal state: entering a
/// terminal ends the episode and the entry reward is attached to the last
/// step. Exactly one of terminated/truncated is set, and a trajectory has at
/// least one step (start states are never terminal).
struct Trajectory {
    std::vector<TrajectoryStep> steps;
    bool terminated = false;
    bool truncated = false;
    std::uint64_t seed = 0;

    int length() const { return static_cast<int>(steps.size()); }
    double total_return() const;

    bool operator==(const Trajectory&) const = default;
};

/// Trajectories sampled under one behaviour run. For sampled batches,
/// trajectory i uses seed base_seed + i, so any single trajectory can be
/// reproduced without regenerating the batch.
struct TrajectoryBatch {
    std::vector<Trajectory> trajectories;
    std::uint64_t base_seed = 0;

    int size() const { return static_cast<int>(trajectories.size()); }
};

/// Samples one episode: start state from the MDP's start distribution, then
/// policy action and successor draws until a terminal is entered or
/// horizon_cap steps have been taken. All randomness comes from the given
/// seed; equal arguments give bit-identical results.
Trajectory sample_trajectory(const TabularMdp& mdp, const TabularPolicy& policy,
                             std::uint64_t seed);

/// Samples n episodes with seeds base_seed, base_seed + 1, ...
TrajectoryBatch sample_batch(const TabularMdp& mdp, const TabularPolicy& policy, int n,
                             std::uint64_t base_seed);

/// Episode log interchange: one JSON object per line,
///   {"seed": <u64>, "terminated": <bool>, "steps": [[s, a, r], ...]}
/// Rewards round-trip exactly (shortest-representation float formatting).
std::string to_jsonl_line(const Trajectory& trajectory);
Trajectory from_jsonl_line(const std::string& line);

void write_jsonl(const TrajectoryBatch& batch, std::ostream& out);

/// Reads every non-empty line. The batch base_seed is taken from the first
/// trajectory (imported logs need not follow the base_seed + i convention).
TrajectoryBatch read_jsonl(std::istream& in);

}  // namespace sisope
