#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "satisficing/env.hpp"

using namespace satisficing;

namespace {

const RewardModel kArms = make_finite({0.6, 0.7, 0.8, 1.0});

RunTrace trace_of(std::initializer_list<Arm> arms)
{
    RunTrace t;
    t.horizon = static_cast<std::int64_t>(arms.size());
    for (const auto& a : arms)
        t.record(a, 0.0, Phase::OracleStep, 1);
    return t;
}

} // namespace

TEST(MeanReward, InstanceValues)
{
    EXPECT_DOUBLE_EQ(mean_reward(kArms, Arm::index(3)), 1.0);
    EXPECT_DOUBLE_EQ(mean_reward(make_concave_instance(), Arm::scalar(0.25)), 1.0);
    EXPECT_DOUBLE_EQ(mean_reward(make_lipschitz_instance(), Arm::point({0.5, 0.7})), 1.0);
    // 2 (32724 - 7678 * 2) / 4100, evaluated in exact rational arithmetic.
    EXPECT_NEAR(mean_reward(make_pricing_instance(), Arm::scalar(2.0)), 8.472195121951219, 1e-12);
}

TEST(MeanReward, RejectsBadArms)
{
    EXPECT_THROW(mean_reward(kArms, Arm::index(4)), std::domain_error);
    EXPECT_THROW(mean_reward(kArms, Arm::scalar(0.1)), std::domain_error);
    EXPECT_THROW(mean_reward(make_concave_instance(), Arm::scalar(1.5)), std::domain_error);
    EXPECT_THROW(mean_reward(make_lipschitz_instance(), Arm::scalar(0.5)), std::domain_error);
    EXPECT_THROW(mean_reward(make_pricing_instance(), Arm::scalar(-0.1)), std::domain_error);
}

TEST(Pull, ZeroNoiseIsExact)
{
    RandomStream rng(1);
    const auto m = make_finite({0.3, 0.9}, 0.0);
    for (int i = 0; i < 10; ++i)
        EXPECT_EQ(pull(m, Arm::index(1), rng), 0.9);
    auto c = make_concave_instance(0.0);
    EXPECT_EQ(pull(c, Arm::scalar(0.4), rng), mean_reward(c, Arm::scalar(0.4)));
}

TEST(Pull, ZeroPriceRevenueIsZero)
{
    RandomStream rng(2);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(pull(make_pricing_instance(), Arm::scalar(0.0), rng), 0.0);
}

TEST(Pull, SampleMeanMatchesMean)
{
    RandomStream rng(3);
    const auto m = make_finite({0.5});
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        s += pull(m, Arm::index(0), rng);
    EXPECT_NEAR(s / n, 0.5, 0.02);
}

TEST(Pull, EmpiricalMeanWithinFourSigmaForEveryKind)
{
    RandomStream rng(4);
    const int n = 100000;
    const std::pair<RewardModel, Arm> cases[] = {
        {kArms, Arm::index(2)},
        {make_concave_instance(), Arm::scalar(0.4)},
        {make_lipschitz_instance(), Arm::point({0.55, 0.65})},
        {make_pricing_instance(), Arm::scalar(3.0)},
    };
    for (const auto& [m, a] : cases) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += pull(m, a, rng);
        // Pricing noise is scaled by the price.
        const double sigma = m.kind() == ModelKind::LinearPricing ? a.x() : m.noise_std;
        EXPECT_NEAR(s / n, mean_reward(m, a), 4.0 * sigma / std::sqrt(n)) << m.name;
    }
}

TEST(BestMean, ClosedForms)
{
    const auto [a, v] = best_mean(kArms);
    EXPECT_EQ(a, Arm::index(3));
    EXPECT_EQ(v, 1.0);

    const auto [c, cv] = best_mean(make_concave_instance());
    EXPECT_DOUBLE_EQ(c.x(), 0.25);
    EXPECT_DOUBLE_EQ(cv, 1.0);

    const auto [p, pv] = best_mean(make_pricing_instance());
    EXPECT_NEAR(p.x(), 2.1310237040896067, 1e-12);
    EXPECT_NEAR(pv, 8.504343864954669, 1e-12);
    EXPECT_NEAR(pv, 8.5043, 1e-3);
}

TEST(BestMean, AgreesWithFineGridSearch)
{
    for (const auto& m : {make_concave_instance(), make_pricing_instance()}) {
        const auto [lo, hi] = m.box();
        double grid_best = -1e300;
        for (double x = lo; x <= hi; x += 1e-5)
            grid_best = std::max(grid_best, mean_reward(m, Arm::scalar(std::min(x, hi))));
        EXPECT_NEAR(best_mean(m).second, grid_best, 1e-6) << m.name;
    }
}

TEST(BestMean, BumpCenterOutsideBoxIsProjected)
{
    RewardModel m{GaussianBump{{1.3, 0.4}, 1.0, 2.0, 1.0, 10.0}, 1.0, "shifted"};
    const auto [a, v] = best_mean(m);
    EXPECT_DOUBLE_EQ(a.coords()[0], 1.0);
    EXPECT_DOUBLE_EQ(a.coords()[1], 0.4);
    EXPECT_NEAR(v, std::exp(-2.0 * 0.09), 1e-15);
}

TEST(Lipschitz, DeclaredConstantHoldsInSupNorm)
{
    const auto m = make_lipschitz_instance();
    const double L = std::get<GaussianBump>(m.params).lipschitz;
    EXPECT_NEAR(L, 60.0 * std::exp(-0.5), 1e-12);
    RandomStream rng(5);
    for (int i = 0; i < 200000; ++i) {
        const Arm x = uniform_arm(m, rng);
        // Nearby pairs probe the steepest part of the bump.
        const double h = 0.02 * rng.uniform();
        const double y0 = std::clamp(x.coords()[0] + h * (2 * rng.uniform() - 1), 0.0, 1.0);
        const double y1 = std::clamp(x.coords()[1] + h * (2 * rng.uniform() - 1), 0.0, 1.0);
        const Arm y = Arm::point({y0, y1});
        const double dist = std::max(std::abs(x.coords()[0] - y0), std::abs(x.coords()[1] - y1));
        ASSERT_LE(std::abs(mean_reward(m, x) - mean_reward(m, y)), L * dist + 1e-12);
    }
}

TEST(Concave, MeanIsConcaveOnDomain)
{
    const auto m = make_concave_instance();
    for (double x = 0.0; x + 0.02 <= 1.0; x += 0.01) {
        const double a = mean_reward(m, Arm::scalar(x));
        const double b = mean_reward(m, Arm::scalar(x + 0.01));
        const double c = mean_reward(m, Arm::scalar(x + 0.02));
        EXPECT_GE(2 * b, a + c - 1e-12);
    }
}

TEST(Regret, HandComputedTrace)
{
    const auto s = summarize(kArms, trace_of({Arm::index(0), Arm::index(3)}), 0.93);
    EXPECT_NEAR(s.satisficing_regret, 0.33, 1e-12);
    EXPECT_NEAR(s.standard_regret, 0.4, 1e-12);
}

TEST(Regret, OptimalTraceHasNoRegret)
{
    const auto s = summarize(kArms, trace_of({Arm::index(3), Arm::index(3), Arm::index(3)}), 0.93);
    EXPECT_EQ(s.satisficing_regret, 0.0);
    EXPECT_EQ(s.standard_regret, 0.0);
}

TEST(Regret, NonRealizableNeverClips)
{
    const auto s = summarize(kArms, trace_of({Arm::index(0), Arm::index(1), Arm::index(3)}), 1.5);
    EXPECT_NEAR(s.satisficing_regret, 0.9 + 0.8 + 0.5, 1e-12);
}

TEST(Regret, PropertiesOnRandomTraces)
{
    RandomStream rng(6);
    for (int rep = 0; rep < 500; ++rep) {
        const double S = 1.2 * rng.uniform();
        RunTrace t;
        t.horizon = 1 + static_cast<std::int64_t>(rng.index(50));
        while (!t.full())
            t.record(uniform_arm(kArms, rng), 0.0, Phase::OracleStep, 1);
        const auto s = summarize(kArms, t, S);
        const double T = static_cast<double>(t.horizon);
        EXPECT_GE(s.satisficing_regret, 0.0);
        EXPECT_GE(s.satisficing_regret, std::max(0.0, s.standard_regret - T * (1.0 - S)) - 1e-9);
        EXPECT_LE(s.satisficing_regret, S * T + 1e-9);
        EXPECT_GE(s.standard_regret, -1e-9);
        EXPECT_LE(s.standard_regret, T * (1.0 - 0.6) + 1e-9);
        if (S <= 0.6) {
            EXPECT_EQ(s.satisficing_regret, 0.0);
        }
    }
}

TEST(Regret, PerRoundBreakdownSumsToTotal)
{
    RunTrace t;
    t.horizon = 5;
    t.record(Arm::index(0), 0, Phase::OracleStep, 1);
    t.record(Arm::index(0), 0, Phase::ForcedSample, 1);
    t.record(Arm::index(1), 0, Phase::OracleStep, 2);
    t.record(Arm::index(1), 0, Phase::LcbTest, 2);
    t.record(Arm::index(3), 0, Phase::OracleStep, 3);
    const auto s = summarize(kArms, t, 0.93);
    ASSERT_EQ(s.per_round.size(), 3U);
    double sum = 0.0;
    for (const auto& r : s.per_round)
        sum += r.satisficing_regret;
    EXPECT_NEAR(sum, s.satisficing_regret, 1e-12);
    EXPECT_EQ(s.per_round[0].forced_steps, 1);
    EXPECT_EQ(s.per_round[1].test_steps, 1);
    EXPECT_EQ(s.rounds_used, 3);
}

TEST(Gap, FiniteAndContinuum)
{
    EXPECT_NEAR(*satisficing_gap(kArms, 0.93), 0.13, 1e-12);
    EXPECT_FALSE(satisficing_gap(kArms, 0.5).has_value());
    EXPECT_EQ(*satisficing_gap(make_concave_instance(), 0.3), 0.0);
    EXPECT_NEAR(*satisficing_gap(make_concave_instance(), 1.5), 0.5, 1e-12);
}

TEST(Validate, RejectsMalformedModels)
{
    EXPECT_THROW(make_finite({}), std::invalid_argument);
    EXPECT_THROW(make_finite({0.5}, -1.0), std::invalid_argument);
    RewardModel bad{ConcaveQuadratic{1.0, -1.0, 0.5, 0.0, 1.0}, 1.0, "convex"};
    EXPECT_THROW(validate(bad), std::invalid_argument);
}
