#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "satisficing/special.hpp"

using satisficing::log_gamma;

TEST(LogGamma, IntegerArgumentsMatchFactorials)
{
    double log_fact = 0.0; // log((n-1)!)
    for (int n = 1; n <= 30; ++n) {
        EXPECT_NEAR(log_gamma(n), log_fact, 1e-12 * std::max(1.0, log_fact)) << n;
        log_fact += std::log(static_cast<double>(n));
    }
}

TEST(LogGamma, AgreesWithStdLgamma)
{
    for (double x = 0.05; x < 60.0; x *= 1.37)
        EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x)))) << x;
}

TEST(LogGamma, HalfInteger)
{
    EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::acos(-1.0)), 1e-14);
}

TEST(LogGamma, RejectsNonPositive)
{
    EXPECT_THROW(log_gamma(0.0), std::domain_error);
    EXPECT_THROW(log_gamma(-2.5), std::domain_error);
}
