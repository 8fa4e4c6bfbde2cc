#include "sisope/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sisope/errors.hpp"
#include "sisope/lift_domain.hpp"

namespace sisope {

TruthReport true_return_dp(const TabularMdp& mdp, const TabularPolicy& pi) {
    if (pi.num_states() != mdp.num_states() || pi.num_actions() != mdp.num_actions())
        throw std::invalid_argument("policy shape does not match MDP");

    const int S = mdp.num_states();
    const int H = mdp.horizon_cap();

    // value[s]: expected return over the next k steps from s.
    // alive[s]: probability the episode survives those k steps.
    std::vector<double> value(static_cast<std::size_t>(S), 0.0);
    std::vector<double> alive(static_cast<std::size_t>(S), 0.0);
    for (int s = 0; s < S; ++s)
        alive[static_cast<std::size_t>(s)] = mdp.is_terminal(s) ? 0.0 : 1.0;

    std::vector<double> next_value(static_cast<std::size_t>(S));
    std::vector<double> next_alive(static_cast<std::size_t>(S));
    for (int k = 1; k <= H; ++k) {
        for (int s = 0; s < S; ++s) {
            if (mdp.is_terminal(s)) {
                next_value[static_cast<std::size_t>(s)] = 0.0;
                next_alive[static_cast<std::size_t>(s)] = 0.0;
                continue;
            }
            double v = 0.0;
            double m = 0.0;
            for (int a = 0; a < mdp.num_actions(); ++a) {
                const double pa = pi.prob(s, a);
                if (pa == 0.0) continue;
                const auto trow = mdp.transition_row(s, a);
                const auto rrow = mdp.reward_row(s, a);
                for (int s2 = 0; s2 < S; ++s2) {
                    const double pt = trow[static_cast<std::size_t>(s2)];
                    if (pt == 0.0) continue;
                    v += pa * pt *
                         (rrow[static_cast<std::size_t>(s2)] +
                          value[static_cast<std::size_t>(s2)]);
                    m += pa * pt * alive[static_cast<std::size_t>(s2)];
                }
            }
            next_value[static_cast<std::size_t>(s)] = v;
            next_alive[static_cast<std::size_t>(s)] = m;
        }
        value.swap(next_value);
        alive.swap(next_alive);
    }

    TruthReport report;
    report.horizon_used = H;
    const auto& start = mdp.start_distribution();
    for (int s = 0; s < S; ++s) {
        report.true_return += start[static_cast<std::size_t>(s)] * value[static_cast<std::size_t>(s)];
        report.truncation_mass +=
            start[static_cast<std::size_t>(s)] * alive[static_cast<std::size_t>(s)];
    }
    return report;
}

namespace {

struct EnumerationAccumulator {
    double e_a = 0.0;
    double e_bg = 0.0;
    double e_abg = 0.0;
    double e_bg2 = 0.0;
    double mass = 0.0;
    std::uint64_t nodes = 0;
};

struct EnumerationContext {
    const TabularMdp& mdp;
    const TabularPolicy& pi_e;
    const TabularPolicy& pi_b;
    const std::vector<char>& dropped_mask;
    int max_len;
    std::uint64_t budget;
    EnumerationAccumulator acc;

    void leaf(double p, double a_w, double b_w, double g) {
        acc.e_a += p * a_w;
        acc.e_bg += p * b_w * g;
        acc.e_abg += p * a_w * b_w * g;
        acc.e_bg2 += p * (b_w * g) * (b_w * g);
        acc.mass += p;
    }

    // Depth-first over (action, successor) branches in index order, so the
    // accumulation order -- and hence the exact floating-point result -- is
    // fixed. Zero-probability branches are pruned exactly.
    void walk(int s, int depth, double p, double a_w, double b_w, double g) {
        if (++acc.nodes > budget) throw BudgetExceeded(acc.nodes, budget);
        if (depth == max_len) {
            leaf(p, a_w, b_w, g); // still running at the cap: truncated return
            return;
        }
        const bool dropped = dropped_mask[static_cast<std::size_t>(s)] != 0;
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const double pa = pi_b.prob(s, a);
            if (pa == 0.0) continue;
            const double rho = pi_e.prob(s, a) / pa;
            const double a2 = dropped ? a_w * rho : a_w;
            const double b2 = dropped ? b_w : b_w * rho;
            const auto trow = mdp.transition_row(s, a);
            const auto rrow = mdp.reward_row(s, a);
            for (int s2 = 0; s2 < mdp.num_states(); ++s2) {
                const double pt = trow[static_cast<std::size_t>(s2)];
                if (pt == 0.0) continue;
                const double p2 = p * pa * pt;
                const double g2 = g + rrow[static_cast<std::size_t>(s2)];
                if (mdp.is_terminal(s2))
                    leaf(p2, a2, b2, g2);
                else
                    walk(s2, depth + 1, p2, a2, b2, g2);
            }
        }
    }
};

} // namespace

ExactMoments enumerate_moments(const TabularMdp& mdp, const TabularPolicy& pi_e,
                               const TabularPolicy& pi_b, const std::vector<int>& dropped_states,
                               int max_len, std::uint64_t node_budget) {
    if (pi_e.num_states() != mdp.num_states() || pi_b.num_states() != mdp.num_states() ||
        pi_e.num_actions() != mdp.num_actions() || pi_b.num_actions() != mdp.num_actions())
        throw std::invalid_argument("policy shape does not match MDP");
    if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");

    std::vector<char> dropped_mask(static_cast<std::size_t>(mdp.num_states()), 0);
    for (int s : dropped_states) {
        if (s < 0 || s >= mdp.num_states())
            throw std::invalid_argument("dropped state " + std::to_string(s) + " out of range");
        dropped_mask[static_cast<std::size_t>(s)] = 1;
    }

    EnumerationContext ctx{mdp, pi_e, pi_b, dropped_mask, max_len, node_budget, {}};
    const auto& start = mdp.start_distribution();
    for (int s = 0; s < mdp.num_states(); ++s) {
        const double p0 = start[static_cast<std::size_t>(s)];
        if (p0 == 0.0) continue;
        ctx.walk(s, 0, p0, 1.0, 1.0, 0.0);
    }

    ExactMoments out;
    out.e_a = ctx.acc.e_a;
    out.e_bg = ctx.acc.e_bg;
    out.e_abg = ctx.acc.e_abg;
    out.cov_a_bg = ctx.acc.e_abg - ctx.acc.e_a * ctx.acc.e_bg;
    out.var_bg_single = ctx.acc.e_bg2 - ctx.acc.e_bg * ctx.acc.e_bg;
    out.mse_sis_single = out.var_bg_single + out.cov_a_bg * out.cov_a_bg;
    out.leaf_mass = ctx.acc.mass;
    out.nodes = ctx.acc.nodes;
    return out;
}

EstimatorStats exact_estimator_stats(const ExactMoments& moments, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    EstimatorStats stats;
    stats.bias = -moments.cov_a_bg;
    stats.variance = moments.var_bg_single / static_cast<double>(n);
    stats.mse = stats.variance + stats.bias * stats.bias;
    return stats;
}

NoiseScanPoint scan_noise_for_return(int bound, int horizon_cap, double target, double lo,
                                     double hi, int steps) {
    if (steps < 2) throw std::invalid_argument("steps must be >= 2");
    if (!(lo >= 0.0 && hi < 0.5 && lo <= hi))
        throw std::invalid_argument("scan range must satisfy 0 <= lo <= hi < 0.5");

    NoiseScanPoint best;
    best.abs_error = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
        const double noise = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        LiftDomainSpec spec;
        spec.bound = bound;
        spec.noise = noise;
        spec.horizon_cap = horizon_cap;
        const auto bundle = build_lift_domain(spec);
        const double value = true_return_dp(bundle.mdp, bundle.eval_policy).true_return;
        const double err = std::abs(value - target);
        if (err < best.abs_error) {
            best.noise = noise;
            best.true_return = value;
            best.abs_error = err;
        }
    }
    return best;
}

}  // namespace sisope
