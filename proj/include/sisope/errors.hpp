#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sisope {

/// The behaviour policy assigns zero probability to an action for which an
/// importance ratio is required. The off-policy estimate is undefined on such
/// data, so the computation refuses instead of returning inf/nan.
class SupportViolation : public std::runtime_error {
  public:
    SupportViolation(int state, int action)
        : std::runtime_error("behaviour policy has zero probability at state " +
                             std::to_string(state) + ", action " + std::to_string(action)),
          state(state), action(action) {}

    int state;
    int action;
};

/// Exhaustive enumeration hit the configured node budget before covering the
/// requested horizon; the caller should lower the horizon or raise the budget.
class BudgetExceeded : public std::runtime_error {
  public:
    BudgetExceeded(std::uint64_t nodes, std::uint64_t budget)
        : std::runtime_error("enumeration refused after " + std::to_string(nodes) +
                             " nodes (budget " + std::to_string(budget) + ")"),
          nodes(nodes), budget(budget) {}

    std::uint64_t nodes;
    std::uint64_t budget;
};

}  // namespace sisope
