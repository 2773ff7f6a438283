#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "montecarlo.hpp"
#include "satisficing/select_lite_plus.hpp"

using namespace satisficing;

namespace {

LiteConfig plus_config(const RewardModel& m, OracleKind oracle, double S, std::int64_t T, double zeta)
{
    SelectConfig base;
    base.S = S;
    base.oracle = oracle;
    base.params = oracle_params(oracle, m);
    base.horizon = T;
    return make_lite_config(base, zeta);
}

std::vector<TrajectoryEntry> trajectory(std::initializer_list<std::pair<std::size_t, double>> steps)
{
    std::vector<TrajectoryEntry> out;
    for (const auto& [a, r] : steps)
        out.push_back({Arm::index(a), r});
    return out;
}

} // namespace

TEST(MostPulled, CountsAndSums)
{
    const auto c = most_pulled(trajectory({{0, 0.5}, {1, 9.0}, {0, 0.25}, {0, 1.0}}), 2);
    EXPECT_EQ(c.arm, 0U);
    EXPECT_EQ(c.pulls, 3);
    EXPECT_DOUBLE_EQ(c.reward_sum, 1.75);
}

TEST(MostPulled, TiesGoToLowestIndex)
{
    EXPECT_EQ(most_pulled(trajectory({{0, 0.0}, {1, 0.0}}), 2).arm, 0U);
    EXPECT_EQ(most_pulled(trajectory({{2, 0.0}, {1, 0.0}}), 3).arm, 1U);
}

TEST(LitePlusLcb, DoubledExponentAndTauDenominator)
{
    const double D = lite_radius_constant(0.5);
    EXPECT_NEAR(lite_plus_lcb(50.0, 100, 0, 0.5, D), 0.5 - std::sqrt(D / 100.0), 1e-15);
    EXPECT_NEAR(lite_plus_lcb(0.0, 100, 100, 0.5, D), -std::sqrt((20.0 + D) / 200.0), 1e-15);
}

TEST(RunLitePlus, RejectsContinuumModels)
{
    const auto m = make_concave_instance();
    RandomStream rng(1);
    auto cfg = plus_config(make_finite({0.5}), OracleKind::Ucb, 0.3, 100, 0.5);
    EXPECT_THROW(run_select_lite_plus(m, cfg, rng), ConfigError);
}

TEST(RunLitePlus, ScheduleIsGeometricWithoutForcedSamples)
{
    const auto m = make_finite({0.2, 0.4, 0.6, 0.8});
    RandomStream rng(2);
    const auto cfg = plus_config(m, OracleKind::Thompson, 0.7, 6000, 0.1);
    const auto trace = run_select_lite_plus(m, cfg, rng);
    ASSERT_EQ(trace.size(), 6000);
    const auto sum = summarize(m, trace, 0.7);
    for (std::size_t i = 0; i < sum.per_round.size(); ++i) {
        EXPECT_EQ(sum.per_round[i].forced_steps, 0);
        if (i + 1 < sum.per_round.size()) {
            EXPECT_EQ(sum.per_round[i].oracle_steps, schedule(sum.per_round[i].round, cfg.base.params).oracle_steps);
        }
    }
}

// Rebuilds each round's guard from the trace: the candidate is the most pulled
// oracle arm, its in-round history seeds r_tot, and every test pull happened
// while the guard held.
TEST(RunLitePlus, HistoryReuseMatchesTrace)
{
    const auto m = make_finite({0.2, 0.4, 0.6, 0.8});
    const double S = 0.7;
    RandomStream rng(3);
    const auto cfg = plus_config(m, OracleKind::Ucb, S, 8000, 0.1);
    const auto trace = run_select_lite_plus(m, cfg, rng);

    std::map<int, std::vector<TrajectoryEntry>> oracle;
    std::map<int, std::vector<TraceStep>> tests;
    for (const auto& s : trace.steps) {
        if (s.phase == Phase::OracleStep)
            oracle[s.round].push_back({s.arm, s.reward});
        else
            tests[s.round].push_back(s);
    }
    for (const auto& [round, traj] : oracle) {
        const auto cand = most_pulled(traj, m.num_arms());
        const std::int64_t sched = schedule(round, cfg.base.params).oracle_steps;
        if (static_cast<std::int64_t>(traj.size()) == sched) {
            EXPECT_GE(cand.pulls, sched / static_cast<std::int64_t>(m.num_arms()));
        }
        double r_tot = cand.reward_sum;
        std::int64_t k = 0;
        for (const auto& s : tests[round]) {
            ASSERT_EQ(s.arm, Arm::index(cand.arm));
            ASSERT_GE(lite_plus_lcb(r_tot, cand.pulls, k, cfg.zeta, cfg.radius_constant), S);
            r_tot += s.reward;
            ++k;
        }
        const bool last_round = round == trace.rounds();
        if (!last_round) {
            EXPECT_LT(lite_plus_lcb(r_tot, cand.pulls, k, cfg.zeta, cfg.radius_constant), S);
        }
    }
}

TEST(RunLitePlus, TwoArmNoiselessBranches)
{
    const auto m = make_finite({1.0, 0.0}, 0.0);
    const double S = 0.5;
    const auto cfg = plus_config(m, OracleKind::Thompson, S, 3000, 0.5);
    auto sup_radius = [&](std::int64_t tau) {
        double sup = 0.0;
        for (std::int64_t k = 0; k <= 3000; ++k)
            sup = std::max(sup, std::sqrt((2.0 * std::sqrt(static_cast<double>(k)) + cfg.radius_constant) /
                                          static_cast<double>(tau + k)));
        return sup;
    };
    double bad_pulls = 0.0;
    int bad_rounds = 0;
    int good_final = 0;
    for (int rep = 0; rep < 5000; ++rep) {
        RandomStream rng(derive_seed(4, static_cast<std::uint64_t>(rep)));
        const auto trace = run_select_lite_plus(m, cfg, rng);
        std::map<int, std::vector<TrajectoryEntry>> oracle;
        std::map<int, std::int64_t> k_of;
        for (const auto& s : trace.steps) {
            if (s.phase == Phase::OracleStep)
                oracle[s.round].push_back({s.arm, s.reward});
            else
                ++k_of[s.round];
        }
        for (const auto& [round, traj] : oracle) {
            const auto cand = most_pulled(traj, 2);
            if (static_cast<std::int64_t>(traj.size()) < schedule(round, cfg.base.params).oracle_steps)
                continue; // truncated by the horizon
            if (cand.arm == 1) {
                bad_pulls += static_cast<double>(k_of[round]);
                ++bad_rounds;
            } else if (sup_radius(cand.pulls) < 1.0 - S) {
                ASSERT_EQ(round, trace.rounds());
                ++good_final;
            }
        }
    }
    EXPECT_GT(good_final, 0);
    if (bad_rounds > 0) {
        EXPECT_LE(bad_pulls / bad_rounds, 1.5);
    }
}

TEST(LitePlusProperties, CoverageWithDoubledExponent)
{
    const double zeta = 0.5;
    const double D = lite_radius_constant(zeta);
    const std::int64_t tau = 9;
    const std::int64_t trials = 400000;
    RandomStream rng(5);
    for (std::int64_t k : {1, 4, 16}) {
        const std::int64_t n = tau + k;
        auto guard = [&](double s) { return lite_plus_lcb(s, tau, k, zeta, D); };
        const double kz = std::pow(static_cast<double>(k), zeta);
        const double stated = std::exp(-D - 2.0 * kz);
        const double p_half = mc::overshoot_rate(0.0, std::sqrt(0.5), n, trials, guard, rng);
        EXPECT_LE(p_half, stated + 3.0 * mc::binomial_se(stated, trials)) << k;
        const double unit = std::exp(-(2.0 * kz + D) / 2.0);
        const double p_unit = mc::overshoot_rate(0.0, 1.0, n, trials, guard, rng);
        EXPECT_LE(p_unit, unit + 3.0 * mc::binomial_se(unit, trials)) << k;
    }
}

TEST(LitePlusProperties, ExitProbabilityUnderMargin)
{
    const double S = 0.2;
    const double margin = 0.8;
    const std::int64_t tau = 1024;
    const double zeta = 0.5;
    const double D = lite_radius_constant(zeta);
    double sup = 0.0;
    for (std::int64_t k = 0; k <= 50 * tau; ++k)
        sup = std::max(sup, std::sqrt((2.0 * std::sqrt(static_cast<double>(k)) + D) / static_cast<double>(tau + k)));
    ASSERT_LE(sup, margin / 4.0);
    RandomStream rng(6);
    const int trials = 1000;
    int exits = 0;
    for (int t = 0; t < trials; ++t)
        exits += mc::run_test_phase(
                     S + margin / 2.0, 1.0, tau, S, 4 * tau,
                     [&](double r_tot, std::int64_t n0, std::int64_t k) { return lite_plus_lcb(r_tot, n0, k, zeta, D); },
                     rng)
                     .exited;
    EXPECT_LE(static_cast<double>(exits) / trials, 0.25 + 3.0 * mc::binomial_se(0.25, trials));
}
