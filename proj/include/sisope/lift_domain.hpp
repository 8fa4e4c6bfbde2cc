#pragma once

#include <vector>

#include "json.hpp"
#include "sisope/mdp.hpp"

namespace sisope {

/// Actions of the 1-D corridor domain.
inline constexpr int kActionLeft = 0;
inline constexpr int kActionRight = 1;

/// Configuration of the corridor-with-lifts benchmark domain.
///
/// States are line coordinates -bound..+bound (state index = coordinate +
/// bound, so there are 2*bound + 1 states). The episode starts at coordinate
/// 0. Both endpoints are terminal. Entering +bound yields +bound, entering
/// -bound yields -bound, and every other step costs -1.
///
/// "Lift" coordinates {-bound+2..-1, 1..bound-2} move one step outward
/// (away from 0, toward sign(s)*bound) with probability 1 - noise and inward
/// with probability noise, for BOTH actions. The remaining interior
/// coordinates {-bound+1, 0, bound-1} move as the chosen action directs with
/// probability 1 - noise and opposite with probability noise.
///
/// The evaluation policy takes `right` with probability 1 - policy slip and
/// `left` otherwise in every state; the behaviour policy is uniform.
struct LiftDomainSpec {
    int bound = 3;              ///< corridor half-width; must be >= 3
    double noise = 0.0;         ///< transition slip probability, in [0, 0.5)
    double policy_noise = -1.0; ///< evaluation-policy slip; negative tracks `noise`
    int horizon_cap = 100;

    double resolved_policy_noise() const { return policy_noise < 0.0 ? noise : policy_noise; }

    int num_states() const { return 2 * bound + 1; }
    int state_index(int coordinate) const { return coordinate + bound; }
    int state_coordinate(int index) const { return index - bound; }
};

struct DomainBundle {
    TabularMdp mdp;
    TabularPolicy eval_policy;
    TabularPolicy behaviour_policy;
    std::vector<int> lift_states; ///< sorted state indices of the lift coordinates
};

/// Builds the corridor MDP together with its policy pair and the ground-truth
/// lift-state set. Throws std::invalid_argument for bound < 3, slip
/// probabilities outside [0, 0.5), or horizon_cap < 1.
DomainBundle build_lift_domain(const LiftDomainSpec& spec);

/// Structural detector: a non-terminal state is a lift state iff every action
/// has an identical transition row and identical reward row. Works on any
/// tabular MDP, not just ones produced by build_lift_domain.
std::vector<int> detect_lift_states(const TabularMdp& mdp);

/// Full dense export for external tools:
/// {num_states, num_actions, horizon_cap, transition[s][a][s'],
///  reward[s][a][s'], terminal_states, start_distribution}.
nlohmann::json mdp_to_json(const TabularMdp& mdp);

}  // namespace sisope
