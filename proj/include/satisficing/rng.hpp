#pragma once

#include <cstdint>
#include <random>

namespace satisficing {

// One step of the splitmix64 sequence. Used only to derive seeds, never as
// the simulation generator itself.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for replication `rep` of an experiment with base seed `base`.
// Depends only on (base, rep), so adding replications never perturbs the
// earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t rep) noexcept
{
    return splitmix64(splitmix64(base) ^ rep);
}

// Private random stream of one episode. Owns its engine and the cached state
// of its normal distribution, so the draw sequence is a pure function of the
// seed.
class RandomStream {
public:
    using engine_type = std::mt19937_64;

    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    double normal() { return normal_(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

    // Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }

    // Uniform integer on [0, n). Requires n > 0.
    std::uint64_t index(std::uint64_t n)
    {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    engine_type& engine() noexcept { return engine_; }

private:
    engine_type engine_;
    std::uint64_t seed_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace satisficing
