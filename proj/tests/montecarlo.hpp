#pragma once

// Monte-Carlo drivers for the forced-sampling + LCB-test phase of a round,
// shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "satisficing/rng.hpp"

namespace mc {

struct PhaseOutcome {
    std::int64_t extra = 0; // test pulls taken (k)
    bool exited = false;    // guard failed before the budget ran out
};

// Candidate of mean mu with `n0` observations already summed (forced pulls,
// or reused history). The n0-sample sum is drawn exactly as N(n0 mu, n0 s^2).
// lcb(r_tot, n0, k) is the guard; the phase runs until it drops below S or
// `budget` test pulls have been taken.
template <class Lcb>
PhaseOutcome run_test_phase(double mu, double sigma, std::int64_t n0, double S, std::int64_t budget, Lcb&& lcb,
                            satisficing::RandomStream& rng)
{
    double r_tot = n0 > 0 ? rng.normal(static_cast<double>(n0) * mu, sigma * std::sqrt(static_cast<double>(n0))) : 0.0;
    PhaseOutcome out;
    while (out.extra < budget) {
        if (lcb(r_tot, n0, out.extra) < S) {
            out.exited = true;
            return out;
        }
        r_tot += mu + sigma * rng.normal();
        ++out.extra;
    }
    return out;
}

// Fraction of trials in which the bound `lcb(sum of n samples) > mu`.
template <class Lcb>
double overshoot_rate(double mu, double sigma, std::int64_t n, std::int64_t trials, Lcb&& lcb,
                      satisficing::RandomStream& rng)
{
    std::int64_t hits = 0;
    const double sd = sigma * std::sqrt(static_cast<double>(n));
    for (std::int64_t i = 0; i < trials; ++i) {
        const double sum = rng.normal(static_cast<double>(n) * mu, sd);
        if (lcb(sum) > mu)
            ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

inline double binomial_se(double p, std::int64_t n)
{
    return std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(n));
}

} // namespace mc
