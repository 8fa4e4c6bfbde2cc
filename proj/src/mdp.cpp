#include "sisope/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sisope/errors.hpp"

namespace sisope {

namespace {

constexpr double kRowSumTolerance = 1e-12;

void check_distribution_row(std::span<const double> row, const std::string& what) {
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0) || p > 1.0 + kRowSumTolerance)
            throw std::invalid_argument(what + ": entry " + std::to_string(p) +
                                        " outside [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw std::invalid_argument(what + ": row sums to " + std::to_string(sum) +
                                    ", expected 1");
}

} // namespace

TabularMdp::TabularMdp(int num_states, int num_actions, std::vector<double> transition,
                       std::vector<double> reward, std::vector<int> terminal_states,
                       std::vector<double> start_distribution, int horizon_cap)
    : num_states_(num_states), num_actions_(num_actions), horizon_cap_(horizon_cap),
      transition_(std::move(transition)), reward_(std::move(reward)),
      terminal_states_(std::move(terminal_states)),
      start_distribution_(std::move(start_distribution)) {
    if (num_states_ < 1) throw std::invalid_argument("num_states must be >= 1");
    if (num_actions_ < 1) throw std::invalid_argument("num_actions must be >= 1");
    if (horizon_cap_ < 1) throw std::invalid_argument("horizon_cap must be >= 1");

    const auto expected = static_cast<std::size_t>(num_states_) * num_actions_ * num_states_;
    if (transition_.size() != expected)
        throw std::invalid_argument("transition tensor has wrong size");
    if (reward_.size() != expected) throw std::invalid_argument("reward tensor has wrong size");
    if (start_distribution_.size() != static_cast<std::size_t>(num_states_))
        throw std::invalid_argument("start distribution has wrong size");

    terminal_mask_.assign(static_cast<std::size_t>(num_states_), 0);
    for (int s : terminal_states_) {
        if (s < 0 || s >= num_states_)
            throw std::invalid_argument("terminal state " + std::to_string(s) + " out of range");
        terminal_mask_[static_cast<std::size_t>(s)] = 1;
    }
    std::sort(terminal_states_.begin(), terminal_states_.end());
    terminal_states_.erase(std::unique(terminal_states_.begin(), terminal_states_.end()),
                           terminal_states_.end());

    for (int s = 0; s < num_states_; ++s)
        for (int a = 0; a < num_actions_; ++a)
            check_distribution_row(transition_row(s, a),
                                   "transition row (s=" + std::to_string(s) +
                                       ", a=" + std::to_string(a) + ")");

    check_distribution_row(start_distribution_, "start distribution");
    for (int s = 0; s < num_states_; ++s)
        if (is_terminal(s) && start_distribution_[static_cast<std::size_t>(s)] != 0.0)
            throw std::invalid_argument("start distribution puts mass on terminal state " +
                                        std::to_string(s));
}

std::vector<int> TabularMdp::non_terminal_states() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(num_states_));
    for (int s = 0; s < num_states_; ++s)
        if (!is_terminal(s)) out.push_back(s);
    return out;
}

TabularPolicy::TabularPolicy(int num_states, int num_actions, std::vector<double> probs)
    : num_states_(num_states), num_actions_(num_actions), probs_(std::move(probs)) {
    if (num_states_ < 1) throw std::invalid_argument("num_states must be >= 1");
    if (num_actions_ < 1) throw std::invalid_argument("num_actions must be >= 1");
    if (probs_.size() != static_cast<std::size_t>(num_states_) * num_actions_)
        throw std::invalid_argument("policy table has wrong size");
    for (int s = 0; s < num_states_; ++s)
        check_distribution_row(row(s), "policy row (s=" + std::to_string(s) + ")");
}

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
    std::vector<double> probs(static_cast<std::size_t>(num_states) * num_actions,
                              1.0 / num_actions);
    return TabularPolicy(num_states, num_actions, std::move(probs));
}

double action_ratio(const TabularPolicy& pi_e, const TabularPolicy& pi_b, int state,
                    int action) {
    const double denom = pi_b.prob(state, action);
    if (denom == 0.0) throw SupportViolation(state, action);
    return pi_e.prob(state, action) / denom;
}

}  // namespace sisope
