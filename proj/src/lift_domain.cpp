#include "sisope/lift_domain.hpp"

#include <cmath>
#include <stdexcept>

namespace sisope {

namespace {

void validate_spec(const LiftDomainSpec& spec) {
    if (spec.bound < 3)
        throw std::invalid_argument("corridor bound must be >= 3 so lift states exist");
    if (spec.noise < 0.0 || spec.noise >= 0.5)
        throw std::invalid_argument("noise must lie in [0, 0.5)");
    const double pol = spec.resolved_policy_noise();
    if (pol < 0.0 || pol >= 0.5)
        throw std::invalid_argument("policy_noise must lie in [0, 0.5)");
    if (spec.horizon_cap < 1) throw std::invalid_argument("horizon_cap must be >= 1");
}

bool is_lift_coordinate(int coord, int bound) {
    const int mag = std::abs(coord);
    return mag >= 1 && mag <= bound - 2;
}

} // namespace

DomainBundle build_lift_domain(const LiftDomainSpec& spec) {
    validate_spec(spec);

    const int bound = spec.bound;
    const int num_states = spec.num_states();
    const int num_actions = 2;
    const double delta = spec.noise;

    const auto tensor_size =
        static_cast<std::size_t>(num_states) * num_actions * num_states;
    std::vector<double> transition(tensor_size, 0.0);
    std::vector<double> reward(tensor_size, 0.0);

    auto flat = [&](int s, int a, int s2) {
        return (static_cast<std::size_t>(s) * num_actions + a) * num_states + s2;
    };
    auto step_reward = [&](int next_coord) {
        if (next_coord == bound) return static_cast<double>(bound);
        if (next_coord == -bound) return static_cast<double>(-bound);
        return -1.0;
    };

    std::vector<int> lift_states;
    for (int coord = -bound; coord <= bound; ++coord) {
        const int s = spec.state_index(coord);
        if (std::abs(coord) == bound) {
            // Terminal endpoints: absorbing self-loop with zero reward. Never
            // occupied during an episode; the row only satisfies validation.
            for (int a = 0; a < num_actions; ++a) transition[flat(s, a, s)] = 1.0;
            continue;
        }

        const bool lift = is_lift_coordinate(coord, bound);
        if (lift) lift_states.push_back(s);

        for (int a = 0; a < num_actions; ++a) {
            int intended;
            if (lift) {
                // Both actions drift outward; the slip moves inward.
                intended = coord > 0 ? coord + 1 : coord - 1;
            } else {
                intended = a == kActionRight ? coord + 1 : coord - 1;
            }
            const int slipped = coord + (intended > coord ? -1 : 1);

            transition[flat(s, a, spec.state_index(intended))] += 1.0 - delta;
            transition[flat(s, a, spec.state_index(slipped))] += delta;
            reward[flat(s, a, spec.state_index(intended))] = step_reward(intended);
            reward[flat(s, a, spec.state_index(slipped))] = step_reward(slipped);
        }
    }

    std::vector<double> start(static_cast<std::size_t>(num_states), 0.0);
    start[static_cast<std::size_t>(spec.state_index(0))] = 1.0;

    TabularMdp mdp(num_states, num_actions, std::move(transition), std::move(reward),
                   {spec.state_index(-bound), spec.state_index(bound)}, std::move(start),
                   spec.horizon_cap);

    const double pol = spec.resolved_policy_noise();
    std::vector<double> eval_probs(static_cast<std::size_t>(num_states) * num_actions);
    for (int s = 0; s < num_states; ++s) {
        eval_probs[static_cast<std::size_t>(s) * num_actions + kActionLeft] = pol;
        eval_probs[static_cast<std::size_t>(s) * num_actions + kActionRight] = 1.0 - pol;
    }

    return DomainBundle{std::move(mdp),
                        TabularPolicy(num_states, num_actions, std::move(eval_probs)),
                        TabularPolicy::uniform(num_states, num_actions),
                        std::move(lift_states)};
}

std::vector<int> detect_lift_states(const TabularMdp& mdp) {
    std::vector<int> found;
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (mdp.is_terminal(s)) continue;
        bool action_free = true;
        const auto t0 = mdp.transition_row(s, 0);
        const auto r0 = mdp.reward_row(s, 0);
        for (int a = 1; a < mdp.num_actions() && action_free; ++a) {
            const auto ta = mdp.transition_row(s, a);
            const auto ra = mdp.reward_row(s, a);
            for (int s2 = 0; s2 < mdp.num_states(); ++s2) {
                if (t0[static_cast<std::size_t>(s2)] != ta[static_cast<std::size_t>(s2)] ||
                    r0[static_cast<std::size_t>(s2)] != ra[static_cast<std::size_t>(s2)]) {
                    action_free = false;
                    break;
                }
            }
        }
        if (action_free) found.push_back(s);
    }
    return found;
}

nlohmann::json mdp_to_json(const TabularMdp& mdp) {
    nlohmann::json transition = nlohmann::json::array();
    nlohmann::json reward = nlohmann::json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        nlohmann::json ts = nlohmann::json::array();
        nlohmann::json rs = nlohmann::json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const auto trow = mdp.transition_row(s, a);
            const auto rrow = mdp.reward_row(s, a);
            ts.push_back(std::vector<double>(trow.begin(), trow.end()));
            rs.push_back(std::vector<double>(rrow.begin(), rrow.end()));
        }
        transition.push_back(std::move(ts));
        reward.push_back(std::move(rs));
    }
    return nlohmann::json{{"num_states", mdp.num_states()},
                          {"num_actions", mdp.num_actions()},
                          {"horizon_cap", mdp.horizon_cap()},
                          {"transition", std::move(transition)},
                          {"reward", std::move(reward)},
                          {"terminal_states", mdp.terminal_states()},
                          {"start_distribution", mdp.start_distribution()}};
}

}  // namespace sisope
