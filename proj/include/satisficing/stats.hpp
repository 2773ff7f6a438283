#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace satisficing {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

/// Sample mean and standard error (sample std / sqrt(n)), single pass
/// (Welford). The standard error of a single observation is reported as 0.
inline MeanStderr mean_stderr(std::span<const double> xs)
{
    MeanStderr out;
    double m2 = 0.0;
    for (double x : xs) {
        ++out.n;
        const double d = x - out.mean;
        out.mean += d / static_cast<double>(out.n);
        m2 += d * (x - out.mean);
    }
    if (out.n > 1)
        out.stderr_ = std::sqrt(m2 / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
    return out;
}

/// Empirical quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q)
{
    if (xs.empty())
        throw std::invalid_argument("quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct Proportion {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for `successes` out of `n` at normal quantile z.
inline Proportion wilson(std::size_t successes, std::size_t n, double z = 1.959963984540054)
{
    if (n == 0)
        throw std::invalid_argument("wilson: empty sample");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {p, std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct ExceedancePoint {
    double x = 0.0;
    Proportion prob;
};

/// P(X > x) for each grid point, with Wilson 95% intervals.
inline std::vector<ExceedancePoint> tail_exceedance(std::span<const double> sample, std::span<const double> x_grid)
{
    if (sample.empty())
        throw std::invalid_argument("tail_exceedance: empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<ExceedancePoint> curve;
    curve.reserve(x_grid.size());
    for (double x : x_grid) {
        const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x));
        curve.push_back({x, wilson(above, sorted.size())});
    }
    return curve;
}

struct Histogram {
    double bin_width = 10.0;
    double origin = 0.0;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const
    {
        std::uint64_t s = 0;
        for (auto c : counts)
            s += c;
        return s;
    }
};

/// Fixed-width histogram starting at `origin`; values below the origin fall
/// into the first bin.
inline Histogram histogram(std::span<const double> sample, double bin_width = 10.0, double origin = 0.0)
{
    if (!(bin_width > 0.0))
        throw std::invalid_argument("histogram: bin width must be positive");
    Histogram h{bin_width, origin, {}};
    for (double x : sample) {
        const double b = std::floor((x - origin) / bin_width);
        const auto bin = b < 0.0 ? std::size_t{0} : static_cast<std::size_t>(b);
        if (bin >= h.counts.size())
            h.counts.resize(bin + 1, 0);
        ++h.counts[bin];
    }
    return h;
}

} // namespace satisficing
