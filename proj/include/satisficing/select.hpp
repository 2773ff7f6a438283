#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "satisficing/env.hpp"
#include "satisficing/oracles.hpp"
#include "satisficing/rng.hpp"

namespace satisficing {

enum class Ablation { Full, SkipStep1, SkipStep2, SkipStep3 };

inline const char* to_string(Ablation a)
{
    switch (a) {
    case Ablation::Full: return "full";
    case Ablation::SkipStep1: return "skip_step1";
    case Ablation::SkipStep2: return "skip_step2";
    case Ablation::SkipStep3: return "skip_step3";
    }
    return "?";
}

inline Ablation parse_ablation(std::string_view s)
{
    if (s == "full") return Ablation::Full;
    if (s == "skip_step1") return Ablation::SkipStep1;
    if (s == "skip_step2") return Ablation::SkipStep2;
    if (s == "skip_step3") return Ablation::SkipStep3;
    throw ConfigError("unknown ablation: " + std::string(s));
}

struct SelectConfig {
    double S = 0.0;
    OracleKind oracle = OracleKind::Ucb;
    OracleParams params;
    OracleConfig oracle_config;
    std::int64_t horizon = 1;
    double gamma_scale = 1.0;
    Ablation ablation = Ablation::Full;
    // Multiplies the confidence radius; 1 assumes unit-variance noise.
    double radius_scale = 1.0;
};

inline void validate(const SelectConfig& cfg)
{
    validate(cfg.params);
    if (cfg.horizon < 1)
        throw ConfigError("horizon must be >= 1");
    if (!(cfg.gamma_scale > 0.0))
        throw ConfigError("gamma scale must be > 0");
    if (!(cfg.radius_scale > 0.0))
        throw ConfigError("radius scale must be > 0");
}

// Per-round lengths: oracle steps t_i and forced pulls T_i.
struct RoundSchedule {
    double gamma = 1.0;
    std::int64_t oracle_steps = 1;
    std::int64_t forced_steps = 1;

    friend bool operator==(const RoundSchedule&, const RoundSchedule&) = default;
};

namespace detail {

inline constexpr double kStepCap = 4.0e18;

// Ceiling that treats values within a relative 1e-12 of an integer as that
// integer, so exact powers survive floating-point evaluation. Saturates at
// kStepCap.
inline std::int64_t snapped_ceil(double x)
{
    if (!(x < kStepCap))
        return static_cast<std::int64_t>(kStepCap);
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x)))
        return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(x));
}

} // namespace detail

/// gamma_i = lambda 2^{-i(1-alpha)/alpha}, t_i = ceil(gamma_i^{-1/(1-alpha)}),
/// T_i = ceil(gamma_i^{-2}). Horizon truncation is left to the runner.
inline RoundSchedule schedule(int i, const OracleParams& params, double gamma_scale = 1.0)
{
    if (i < 1)
        throw std::invalid_argument("schedule: round index must be >= 1");
    const double a = params.alpha;
    const double log2_gamma = -static_cast<double>(i) * (1.0 - a) / a + std::log2(gamma_scale);
    RoundSchedule s;
    s.gamma = std::exp2(log2_gamma);
    s.oracle_steps = detail::snapped_ceil(std::exp2(-log2_gamma / (1.0 - a)));
    s.forced_steps = detail::snapped_ceil(std::exp2(-2.0 * log2_gamma));
    return s;
}

/// Lower confidence bound r_tot / n - sqrt(4 log n / n); -inf for n = 0.
/// `radius_scale` multiplies the radius for noise with a known scale.
inline double lcb(double r_tot, std::int64_t n, double radius_scale = 1.0)
{
    if (n <= 0)
        return -std::numeric_limits<double>::infinity();
    const double nn = static_cast<double>(n);
    return r_tot / nn - radius_scale * std::sqrt(4.0 * std::log(nn) / nn);
}

namespace detail {

// Round loop shared by SELECT and SELECT-LITE.
//   plan(i)               -> RoundSchedule for round i
//   test_lcb(r, forced, k) -> LCB after `forced` forced pulls and k test pulls
template <class Plan, class TestLcb>
RunTrace run_round_loop(const RewardModel& model, OracleKind oracle, const OracleConfig& oracle_cfg,
                        std::int64_t horizon, double S, Ablation ablation, Plan&& plan, TestLcb&& test_lcb,
                        RandomStream& rng)
{
    if (!compatible(oracle, model.kind()))
        throw ConfigError(std::string("oracle ") + to_string(oracle) + " cannot run on a " + to_string(model.kind()) +
                          " model");
    RunTrace trace;
    trace.horizon = horizon;
    trace.steps.reserve(static_cast<std::size_t>(horizon));

    for (int round = 1; !trace.full(); ++round) {
        const RoundSchedule sched = plan(round);

        // Step 1: candidate from the oracle trajectory, or uniform (ablation).
        Arm candidate;
        if (ablation == Ablation::SkipStep1) {
            candidate = uniform_arm(model, rng);
        } else {
            const std::int64_t steps = std::min(sched.oracle_steps, trace.remaining());
            auto session = new_session(oracle, model, std::max<std::int64_t>(sched.oracle_steps, 2), rng, oracle_cfg);
            for (std::int64_t s = 0; s < steps; ++s) {
                const Arm a = session->select_arm();
                const double y = pull(model, a, rng);
                session->observe(y);
                trace.record(a, y, Phase::OracleStep, round);
            }
            if (trace.full())
                break;
            const auto q = rng.index(static_cast<std::uint64_t>(steps));
            candidate = session->trajectory()[q].arm;
        }

        // Step 2: forced sampling.
        double r_tot = 0.0;
        std::int64_t forced = 0;
        if (ablation != Ablation::SkipStep2) {
            const std::int64_t steps = std::min(sched.forced_steps, trace.remaining());
            for (; forced < steps; ++forced) {
                const double y = pull(model, candidate, rng);
                r_tot += y;
                trace.record(candidate, y, Phase::ForcedSample, round);
            }
        }
        if (ablation == Ablation::SkipStep3 || trace.full())
            continue;

        // Step 3: keep pulling while the LCB stays at or above S. Without
        // forced samples the test starts with one pull so n >= 1.
        std::int64_t k = 0;
        auto test_pull = [&] {
            const double y = pull(model, candidate, rng);
            r_tot += y;
            ++k;
            trace.record(candidate, y, Phase::LcbTest, round);
        };
        if (ablation == Ablation::SkipStep2)
            test_pull();
        while (!trace.full() && test_lcb(r_tot, forced, k) >= S)
            test_pull();
    }
    return trace;
}

} // namespace detail

/// One SELECT episode of cfg.horizon steps.
inline RunTrace run_select(const RewardModel& model, const SelectConfig& cfg, RandomStream& rng)
{
    validate(cfg);
    const auto plan = [&](int i) { return schedule(i, cfg.params, cfg.gamma_scale); };
    const auto test = [&](double r_tot, std::int64_t forced, std::int64_t k) {
        return lcb(r_tot, forced + k, cfg.radius_scale);
    };
    return detail::run_round_loop(model, cfg.oracle, cfg.oracle_config, cfg.horizon, cfg.S, cfg.ablation, plan, test,
                                  rng);
}

/// The oracle alone for the whole horizon, as a single round.
inline RunTrace run_oracle_only(const RewardModel& model, OracleKind oracle, const OracleConfig& oracle_cfg,
                                std::int64_t horizon, RandomStream& rng)
{
    RunTrace trace;
    trace.horizon = horizon;
    trace.steps.reserve(static_cast<std::size_t>(horizon));
    auto session = new_session(oracle, model, std::max<std::int64_t>(horizon, 2), rng, oracle_cfg);
    while (!trace.full()) {
        const Arm a = session->select_arm();
        const double y = pull(model, a, rng);
        session->observe(y);
        trace.record(a, y, Phase::OracleStep, 1);
    }
    return trace;
}

} // namespace satisficing
