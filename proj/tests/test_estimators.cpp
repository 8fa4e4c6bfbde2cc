#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "sisope/errors.hpp"
#include "sisope/estimators.hpp"
#include "sisope/lift_domain.hpp"
#include "sisope/trajectory.hpp"

using namespace sisope;

namespace {

DomainBundle det3() {
    LiftDomainSpec spec;
    spec.bound = 3;
    spec.noise = 0.0;
    return build_lift_domain(spec);
}

// Straight walk to +3: full weight 2^3 = 8 against the uniform behaviour
// policy, return -1 - 1 + 3 = 1.
Trajectory all_right() {
    Trajectory t;
    t.steps = {{3, kActionRight, -1.0}, {4, kActionRight, -1.0}, {5, kActionRight, 3.0}};
    t.terminated = true;
    return t;
}

// Straight walk to -3 (the lift at -1 forces the second step outward): every
// ratio is 0 under the always-right evaluation policy, return -5.
Trajectory left_crash() {
    Trajectory t;
    t.steps = {{3, kActionLeft, -1.0}, {2, kActionLeft, -1.0}, {1, kActionLeft, -3.0}};
    t.terminated = true;
    return t;
}

TrajectoryBatch two_walks() {
    TrajectoryBatch batch;
    batch.trajectories = {all_right(), left_crash()};
    return batch;
}

} // namespace

TEST_CASE("is and pdis on hand-derived walks") {
    const auto bundle = det3();
    const auto batch = two_walks();

    const auto is = estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy);
    CHECK(is.estimator_name == "is");
    CHECK(is.per_trajectory_contributions == std::vector<double>{8.0, 0.0});
    CHECK(is.estimate == 4.0);
    // sample variance of {8, 0} is 32; divided by n = 2.
    CHECK(is.estimator_variance_hat == 16.0);
    CHECK(is.num_truncated == 0);

    const auto pdis = estimate_pdis(batch, bundle.eval_policy, bundle.behaviour_policy);
    CHECK(pdis.estimator_name == "pdis");
    // 2*(-1) + 4*(-1) + 8*3 = 18 for the right walk, all-zero prefixes left.
    CHECK(pdis.per_trajectory_contributions == std::vector<double>{18.0, 0.0});
    CHECK(pdis.estimate == 9.0);
}

TEST_CASE("state-dropping on hand-derived walks") {
    const auto bundle = det3();
    const auto batch = two_walks();

    const auto decomp =
        decompose_weights(batch, bundle.eval_policy, bundle.behaviour_policy, {2, 4});
    CHECK(decomp.dropped_set == std::vector<int>{2, 4});
    CHECK(decomp.a_weights == std::vector<double>{2.0, 0.0});
    CHECK(decomp.b_weights == std::vector<double>{4.0, 0.0});
    CHECK(decomp.returns == std::vector<double>{1.0, -5.0});
    CHECK(decomp.retained_visits == std::vector<int>{2, 2});

    // a * b * g reassembles the full importance-sampling contribution.
    const auto is = estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(decomp.a_weights[i] * decomp.b_weights[i] * decomp.returns[i] ==
              is.per_trajectory_contributions[i]);

    const auto sis = estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy, {2, 4});
    CHECK(sis.estimator_name == "sis");
    CHECK(sis.per_trajectory_contributions == std::vector<double>{4.0, 0.0});
    CHECK(sis.estimate == 2.0);
    CHECK(sis.extra["dropped"] == nlohmann::json({2, 4}));
}

TEST_CASE("dropped set is normalised, out-of-range throws") {
    const auto bundle = det3();
    const auto batch = two_walks();
    const auto decomp =
        decompose_weights(batch, bundle.eval_policy, bundle.behaviour_policy, {4, 2, 4, 2});
    CHECK(decomp.dropped_set == std::vector<int>{2, 4});
    CHECK(decomp.a_weights == std::vector<double>{2.0, 0.0});

    CHECK_THROWS_AS(
        decompose_weights(batch, bundle.eval_policy, bundle.behaviour_policy, {7}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        decompose_weights(batch, bundle.eval_policy, bundle.behaviour_policy, {-1}),
        std::invalid_argument);
}

TEST_CASE("empirical mse surrogate, hand-checked") {
    WeightDecomposition decomp;
    decomp.a_weights = {1.0, 3.0};
    decomp.b_weights = {2.0, 4.0};
    decomp.returns = {1.0, 1.0};
    decomp.retained_visits = {1, 1};
    const auto scores = empirical_mse_hat(decomp);
    // b*g = {2, 4}: sample variance 2, over n = 2 -> 1. Covariance of
    // ({1,3}, {2,4}) is 2. mse = 1 + 2^2.
    CHECK(scores.var_hat == 1.0);
    CHECK(scores.cov_hat == 2.0);
    CHECK(scores.mse_hat == 5.0);

    WeightDecomposition single;
    single.a_weights = {1.0};
    single.b_weights = {1.0};
    single.returns = {0.0};
    single.retained_visits = {0};
    CHECK_THROWS_AS(empirical_mse_hat(single), std::invalid_argument);
}

TEST_CASE("incris admissibility floor on a zero-prefix batch") {
    const auto bundle = det3();
    const auto batch = two_walks();
    const auto incris = estimate_incris(batch, bundle.eval_policy, bundle.behaviour_policy);
    // The left walk's first ratio is already 0, so every window shorter than
    // the full trajectory would discard an exactly-zero prefix; only k = 3
    // remains and INCRIS must coincide with PDIS.
    CHECK(incris.extra["admissible_min_k"] == 3);
    CHECK(incris.extra["k"] == 3);
    const auto pdis = estimate_pdis(batch, bundle.eval_policy, bundle.behaviour_policy);
    CHECK(incris.estimate == pdis.estimate);
    CHECK(incris.per_trajectory_contributions == pdis.per_trajectory_contributions);
}

TEST_CASE("incris ties break toward the largest window") {
    const auto bundle = det3();
    TrajectoryBatch batch;
    batch.trajectories = {all_right(), all_right()};
    // No ratio is ever zero, so every window down to k = 0 is admissible;
    // identical trajectories give every window zero estimated variance and
    // zero estimated bias, so the tie must resolve to k = max length, i.e.
    // plain PDIS.
    const auto incris = estimate_incris(batch, bundle.eval_policy, bundle.behaviour_policy);
    CHECK(incris.extra["admissible_min_k"] == 0);
    CHECK(incris.extra["k"] == 3);
    CHECK(incris.estimate == 18.0);
}

TEST_CASE("on-policy data collapses every estimator to the mean return") {
    const auto bundle = det3();
    const auto uniform = TabularPolicy::uniform(7, 2);
    const auto batch = sample_batch(bundle.mdp, uniform, 30, 12345);
    double mean_return = 0.0;
    for (const auto& t : batch.trajectories) mean_return += t.total_return();
    mean_return /= 30.0;

    const auto all = bundle.mdp.non_terminal_states();
    const double estimates[] = {
        estimate_is(batch, uniform, uniform).estimate,
        estimate_pdis(batch, uniform, uniform).estimate,
        estimate_incris(batch, uniform, uniform).estimate,
        estimate_sis(batch, uniform, uniform, {}).estimate,
        estimate_sis(batch, uniform, uniform, all).estimate,
    };
    for (double e : estimates) CHECK(e == doctest::Approx(mean_return).epsilon(1e-12));
}

TEST_CASE("sis identities on sampled data") {
    const auto bundle = det3();
    const auto batch = sample_batch(bundle.mdp, bundle.behaviour_policy, 50, 11);

    const auto is = estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy);
    const auto sis_none =
        estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy, {});
    CHECK(sis_none.estimate == doctest::Approx(is.estimate).epsilon(1e-12));

    const auto sis_all = estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy,
                                      bundle.mdp.non_terminal_states());
    double mean_return = 0.0;
    for (const auto& t : batch.trajectories) mean_return += t.total_return();
    mean_return /= 50.0;
    CHECK(sis_all.estimate == doctest::Approx(mean_return).epsilon(1e-12));

    const auto decomp = decompose_weights(batch, bundle.eval_policy, bundle.behaviour_policy,
                                          bundle.lift_states);
    for (std::size_t i = 0; i < decomp.a_weights.size(); ++i) {
        const double full = is.per_trajectory_contributions[i];
        const double g = decomp.returns[i];
        CHECK(decomp.a_weights[i] * decomp.b_weights[i] * g ==
              doctest::Approx(full).epsilon(1e-12));
    }
}

TEST_CASE("behaviour support violations are refused") {
    const auto bundle = det3();
    std::vector<double> probs(14, 0.5);
    probs[3 * 2 + 0] = 1.0; // state 3 never takes `right`
    probs[3 * 2 + 1] = 0.0;
    const TabularPolicy pb_no_right(7, 2, probs);

    TrajectoryBatch batch;
    batch.trajectories = {all_right()};
    CHECK_THROWS_AS(estimate_is(batch, bundle.eval_policy, pb_no_right), SupportViolation);
    CHECK_THROWS_AS(
        decompose_weights(batch, bundle.eval_policy, pb_no_right, {2, 4}),
        SupportViolation);
}

TEST_CASE("closed-form variance cap, hand-checked") {
    const auto bundle = det3();
    TrajectoryBatch batch;
    batch.trajectories = {all_right()};
    // Retained states after dropping the lifts: indices 1, 3, 5. The right
    // walk touches 3 and 5, so m_b = 2; the largest behaviour-supported
    // ratio at a retained state is 2. Cap: (3 * 3 * 2^2)^2 / 4.
    const auto report = variance_upper_bound(batch, bundle.eval_policy,
                                             bundle.behaviour_policy, 3.0, 3, {1, 3, 5});
    CHECK(report.rho_max == 2.0);
    CHECK(report.m_b == 2);
    CHECK(report.r_max == 3.0);
    CHECK(report.h == 3);
    CHECK(report.bound == 324.0);
    CHECK(report.absolute_range);

    // A retained state whose required ratio is unbounded must be refused.
    std::vector<double> probs(14, 0.5);
    probs[3 * 2 + 0] = 1.0;
    probs[3 * 2 + 1] = 0.0;
    const TabularPolicy pb_no_right(7, 2, probs);
    TrajectoryBatch safe;
    safe.trajectories = {left_crash()};
    CHECK_THROWS_AS(variance_upper_bound(safe, bundle.eval_policy, pb_no_right, 3.0, 3, {3}),
                    SupportViolation);
}

TEST_CASE("truncation is counted and reported") {
    LiftDomainSpec spec;
    spec.bound = 3;
    spec.noise = 0.0;
    spec.horizon_cap = 2;
    const auto bundle = build_lift_domain(spec);
    const auto batch = sample_batch(bundle.mdp, bundle.eval_policy, 3, 1);
    const auto report = estimate_is(batch, bundle.eval_policy, bundle.behaviour_policy);
    CHECK(report.num_truncated == 3);
}

TEST_CASE("estimate report json shape") {
    const auto bundle = det3();
    const auto batch = two_walks();
    const auto j =
        estimate_sis(batch, bundle.eval_policy, bundle.behaviour_policy, {2, 4}).to_json();
    CHECK(j["estimator_name"] == "sis");
    CHECK(j["estimate"] == 2.0);
    CHECK(j["n"] == 2);
    CHECK(j["num_truncated"] == 0);
    CHECK(j["extra"]["dropped"] == nlohmann::json({2, 4}));
}

TEST_CASE("empty batch is rejected") {
    const auto bundle = det3();
    TrajectoryBatch empty;
    CHECK_THROWS_AS(estimate_is(empty, bundle.eval_policy, bundle.behaviour_policy),
                    std::invalid_argument);
}
