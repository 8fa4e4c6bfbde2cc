#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sisope {

/// Finite MDP with dense tabular dynamics and a hard episode-length cap.
///
/// Transition and reward tensors are stored row-major as [s][a][s'].
/// Construction validates the model and throws std::invalid_argument on:
///   - any transition row not summing to 1 within 1e-12, or entries outside [0, 1]
///   - a start distribution that does not sum to 1, or that puts mass on a
///     terminal state
///   - horizon_cap < 1, or empty state/action spaces
///
/// Terminal states are absorbing by convention: they end an episode when
/// entered and are never occupied as a step's state. Their transition rows
/// must still be valid distributions (a self-loop is the natural choice).
class TabularMdp {
  public:
    TabularMdp(int num_states, int num_actions, std::vector<double> transition,
               std::vector<double> reward, std::vector<int> terminal_states,
               std::vector<double> start_distribution, int horizon_cap);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int horizon_cap() const { return horizon_cap_; }

    double transition(int s, int a, int s2) const { return transition_[flat(s, a, s2)]; }
    double reward(int s, int a, int s2) const { return reward_[flat(s, a, s2)]; }
    bool is_terminal(int s) const { return terminal_mask_[static_cast<std::size_t>(s)] != 0; }

    std::span<const double> transition_row(int s, int a) const {
        return {transition_.data() + flat(s, a, 0), static_cast<std::size_t>(num_states_)};
    }
    std::span<const double> reward_row(int s, int a) const {
        return {reward_.data() + flat(s, a, 0), static_cast<std::size_t>(num_states_)};
    }

    /// Sorted list of terminal state indices.
    const std::vector<int>& terminal_states() const { return terminal_states_; }
    const std::vector<double>& start_distribution() const { return start_distribution_; }

    /// Sorted list of all non-terminal state indices.
    std::vector<int> non_terminal_states() const;

  private:
    std::size_t flat(int s, int a, int s2) const {
        return (static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ + s2;
    }

    int num_states_;
    int num_actions_;
    int horizon_cap_;
    std::vector<double> transition_;
    std::vector<double> reward_;
    std::vector<int> terminal_states_;
    std::vector<char> terminal_mask_;
    std::vector<double> start_distribution_;
};

/// Stationary stochastic policy over the same state/action index space as the
/// MDP it is used with. Rows are validated like transition rows.
class TabularPolicy {
  public:
    TabularPolicy(int num_states, int num_actions, std::vector<double> probs);

    static TabularPolicy uniform(int num_states, int num_actions);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

    double prob(int s, int a) const {
        return probs_[static_cast<std::size_t>(s) * num_actions_ + a];
    }
    std::span<const double> row(int s) const {
        return {probs_.data() + static_cast<std::size_t>(s) * num_actions_,
                static_cast<std::size_t>(num_actions_)};
    }

  private:
    int num_states_;
    int num_actions_;
    std::vector<double> probs_;
};

/// Importance ratio pi_e(a|s) / pi_b(a|s).
///
/// Returns 0 when the evaluation policy never takes the action; throws
/// SupportViolation when pi_b(a|s) = 0, since the ratio (and any estimate
/// built from it) is undefined there.
double action_ratio(const TabularPolicy& pi_e, const TabularPolicy& pi_b, int state, int action);

}  // namespace sisope
