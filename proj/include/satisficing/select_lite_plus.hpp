#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "satisficing/select_lite.hpp"

namespace satisficing {

// Candidate of one SELECT-LITE+ round: the most-pulled arm of the oracle
// trajectory together with its in-round history.
struct LitePlusCandidate {
    std::size_t arm = 0;
    std::int64_t pulls = 0; // tau_i
    double reward_sum = 0.0;
};

/// Most frequently pulled arm of a finite-armed trajectory, lowest index on
/// ties, with its pull count and observed reward sum.
inline LitePlusCandidate most_pulled(const std::vector<TrajectoryEntry>& trajectory, std::size_t num_arms)
{
    std::vector<std::int64_t> counts(num_arms, 0);
    std::vector<double> sums(num_arms, 0.0);
    for (const auto& e : trajectory) {
        ++counts[e.arm.idx()];
        sums[e.arm.idx()] += e.reward;
    }
    LitePlusCandidate c;
    for (std::size_t a = 0; a < num_arms; ++a)
        if (counts[a] > counts[c.arm])
            c.arm = a;
    c.pulls = counts[c.arm];
    c.reward_sum = sums[c.arm];
    return c;
}

/// r_tot / (tau + k) - sqrt((2 k^zeta + D) / (tau + k)).
inline double lite_plus_lcb(double r_tot, std::int64_t tau, std::int64_t k, double zeta, double radius_constant,
                            double radius_scale = 1.0)
{
    const std::int64_t n = tau + k;
    if (n <= 0)
        return -std::numeric_limits<double>::infinity();
    const double nn = static_cast<double>(n);
    const double kz = k > 0 ? std::pow(static_cast<double>(k), zeta) : 0.0;
    return r_tot / nn - radius_scale * std::sqrt((2.0 * kz + radius_constant) / nn);
}

/// One SELECT-LITE+ episode on a finite-armed model: geometric schedule, no
/// forced sampling, most-pulled candidate, oracle history reused in the test.
/// Ablation settings are ignored.
inline RunTrace run_select_lite_plus(const RewardModel& model, const LiteConfig& cfg, RandomStream& rng)
{
    validate(cfg);
    if (!model.is_finite())
        throw ConfigError("SELECT-LITE+ requires a finite-armed model");
    const auto& b = cfg.base;
    if (!compatible(b.oracle, model.kind()))
        throw ConfigError(std::string("oracle ") + to_string(b.oracle) + " is not a finite-armed oracle");

    RunTrace trace;
    trace.horizon = b.horizon;
    trace.steps.reserve(static_cast<std::size_t>(b.horizon));

    for (int round = 1; !trace.full(); ++round) {
        const RoundSchedule sched = schedule(round, b.params, b.gamma_scale);
        const std::int64_t steps = std::min(sched.oracle_steps, trace.remaining());
        auto session = new_session(b.oracle, model, std::max<std::int64_t>(sched.oracle_steps, 2), rng, b.oracle_config);
        for (std::int64_t s = 0; s < steps; ++s) {
            const Arm a = session->select_arm();
            const double y = pull(model, a, rng);
            session->observe(y);
            trace.record(a, y, Phase::OracleStep, round);
        }
        if (trace.full())
            break;

        const LitePlusCandidate cand = most_pulled(session->trajectory(), model.num_arms());
        const Arm arm = Arm::index(cand.arm);
        double r_tot = cand.reward_sum;
        std::int64_t k = 0;
        while (!trace.full() && lite_plus_lcb(r_tot, cand.pulls, k, cfg.zeta, cfg.radius_constant, b.radius_scale) >= b.S) {
            const double y = pull(model, arm, rng);
            r_tot += y;
            ++k;
            trace.record(arm, y, Phase::LcbTest, round);
        }
    }
    return trace;
}

} // namespace satisficing
