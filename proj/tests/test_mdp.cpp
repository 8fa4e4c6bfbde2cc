#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "sisope/errors.hpp"
#include "sisope/mdp.hpp"

using namespace sisope;

namespace {

// 3 states, 2 actions, state 2 terminal. From 0: a0 -> 1, a1 -> 2. From 1:
// a0 -> {0 w.p. 0.5, 2 w.p. 0.5}, a1 -> 2. Terminal self-loops.
TabularMdp tiny_mdp() {
    const int ns = 3, na = 2;
    std::vector<double> t(static_cast<std::size_t>(ns * na * ns), 0.0);
    std::vector<double> r(static_cast<std::size_t>(ns * na * ns), 0.0);
    auto at = [&](std::vector<double>& v, int s, int a, int s2) -> double& {
        return v[static_cast<std::size_t>((s * na + a) * ns + s2)];
    };
    at(t, 0, 0, 1) = 1.0;
    at(t, 0, 1, 2) = 1.0;
    at(t, 1, 0, 0) = 0.5;
    at(t, 1, 0, 2) = 0.5;
    at(t, 1, 1, 2) = 1.0;
    at(t, 2, 0, 2) = 1.0;
    at(t, 2, 1, 2) = 1.0;
    at(r, 0, 0, 1) = -1.0;
    at(r, 0, 1, 2) = 10.0;
    at(r, 1, 0, 0) = -1.0;
    at(r, 1, 0, 2) = 5.0;
    at(r, 1, 1, 2) = 2.0;
    return TabularMdp(ns, na, t, r, {2}, {1.0, 0.0, 0.0}, 4);
}

} // namespace

TEST_CASE("tabular mdp accessors") {
    const auto mdp = tiny_mdp();
    CHECK(mdp.num_states() == 3);
    CHECK(mdp.num_actions() == 2);
    CHECK(mdp.horizon_cap() == 4);
    CHECK(mdp.transition(0, 0, 1) == 1.0);
    CHECK(mdp.transition(1, 0, 0) == 0.5);
    CHECK(mdp.transition(1, 0, 1) == 0.0);
    CHECK(mdp.reward(0, 1, 2) == 10.0);
    CHECK(mdp.reward(1, 1, 2) == 2.0);
    CHECK(mdp.is_terminal(2));
    CHECK_FALSE(mdp.is_terminal(0));
    CHECK(mdp.terminal_states() == std::vector<int>{2});
    CHECK(mdp.non_terminal_states() == std::vector<int>{0, 1});

    const auto row = mdp.transition_row(1, 0);
    REQUIRE(row.size() == 3);
    CHECK(row[0] == 0.5);
    CHECK(row[2] == 0.5);
    CHECK(mdp.start_distribution() == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("tabular mdp validation") {
    const int ns = 2, na = 1;
    std::vector<double> ok_t = {0.0, 1.0, 0.0, 1.0}; // 0 -> 1, 1 -> 1
    std::vector<double> r(4, 0.0);

    SUBCASE("row not summing to one") {
        std::vector<double> t = {0.4, 0.5, 0.0, 1.0};
        CHECK_THROWS_AS(TabularMdp(ns, na, t, r, {1}, {1.0, 0.0}, 3), std::invalid_argument);
    }
    SUBCASE("negative probability") {
        std::vector<double> t = {-0.1, 1.1, 0.0, 1.0};
        CHECK_THROWS_AS(TabularMdp(ns, na, t, r, {1}, {1.0, 0.0}, 3), std::invalid_argument);
    }
    SUBCASE("start distribution not summing to one") {
        CHECK_THROWS_AS(TabularMdp(ns, na, ok_t, r, {1}, {0.5, 0.0}, 3), std::invalid_argument);
    }
    SUBCASE("start mass on a terminal state") {
        CHECK_THROWS_AS(TabularMdp(ns, na, ok_t, r, {1}, {0.0, 1.0}, 3), std::invalid_argument);
    }
    SUBCASE("horizon cap below one") {
        CHECK_THROWS_AS(TabularMdp(ns, na, ok_t, r, {1}, {1.0, 0.0}, 0), std::invalid_argument);
    }
    SUBCASE("empty state space") {
        CHECK_THROWS_AS(TabularMdp(0, 1, {}, {}, {}, {}, 3), std::invalid_argument);
    }
    SUBCASE("valid model does not throw") {
        CHECK_NOTHROW(TabularMdp(ns, na, ok_t, r, {1}, {1.0, 0.0}, 3));
    }
}

TEST_CASE("tabular policy") {
    const auto uniform = TabularPolicy::uniform(3, 2);
    CHECK(uniform.num_states() == 3);
    CHECK(uniform.num_actions() == 2);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) CHECK(uniform.prob(s, a) == 0.5);

    const TabularPolicy skew(2, 2, {0.9, 0.1, 0.25, 0.75});
    CHECK(skew.prob(0, 0) == 0.9);
    CHECK(skew.prob(1, 1) == 0.75);
    const auto row = skew.row(1);
    REQUIRE(row.size() == 2);
    CHECK(row[0] == 0.25);

    CHECK_THROWS_AS(TabularPolicy(2, 2, {0.9, 0.2, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(TabularPolicy(2, 2, {1.1, -0.1, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("action ratio") {
    const TabularPolicy pi_e(1, 2, {0.9, 0.1});
    const TabularPolicy pi_b(1, 2, {0.5, 0.5});
    CHECK(action_ratio(pi_e, pi_b, 0, 0) == doctest::Approx(1.8).epsilon(1e-15));
    CHECK(action_ratio(pi_e, pi_b, 0, 1) == doctest::Approx(0.2).epsilon(1e-15));

    const TabularPolicy never_left(1, 2, {0.0, 1.0});
    CHECK(action_ratio(never_left, pi_b, 0, 0) == 0.0);

    SUBCASE("behaviour support violation") {
        const TabularPolicy pb_right_only(1, 2, {0.0, 1.0});
        try {
            action_ratio(pi_e, pb_right_only, 0, 0);
            FAIL("expected SupportViolation");
        } catch (const SupportViolation& e) {
            CHECK(e.state == 0);
            CHECK(e.action == 0);
        }
    }
}
