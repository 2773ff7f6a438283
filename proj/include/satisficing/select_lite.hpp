#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "satisficing/select.hpp"
#include "satisficing/special.hpp"

namespace satisficing {

/// log(8 zeta^{-1} Gamma(zeta^{-1})), the additive constant of the light-tail
/// radius. Throws std::domain_error unless 0 < zeta < 1.
inline double lite_radius_constant(double zeta)
{
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::domain_error("zeta must lie in (0, 1)");
    const double inv = 1.0 / zeta;
    return std::log(8.0 * inv) + log_gamma(inv);
}

struct LiteConfig {
    SelectConfig base;
    double zeta = 0.1;
    // Filled by make_lite_config / validate.
    double radius_constant = 0.0;
};

inline LiteConfig make_lite_config(SelectConfig base, double zeta)
{
    LiteConfig cfg{std::move(base), zeta, lite_radius_constant(zeta)};
    return cfg;
}

inline void validate(const LiteConfig& cfg)
{
    validate(cfg.base);
    if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0))
        throw ConfigError("zeta must lie in (0, 1)");
    if (!(cfg.radius_constant >= std::log(8.0)))
        throw ConfigError("radius constant must be >= log 8; build the config with make_lite_config");
}

/// Polynomial schedule gamma_i = lambda i^{-(1/zeta - 1)(1 - alpha)} with the
/// same ceiling formulas as SELECT.
inline RoundSchedule lite_schedule(int i, const OracleParams& params, double zeta, double gamma_scale = 1.0)
{
    if (i < 1)
        throw std::invalid_argument("lite_schedule: round index must be >= 1");
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::domain_error("zeta must lie in (0, 1)");
    const double a = params.alpha;
    const double log_gamma_i = -(1.0 / zeta - 1.0) * (1.0 - a) * std::log(static_cast<double>(i)) + std::log(gamma_scale);
    RoundSchedule s;
    s.gamma = std::exp(log_gamma_i);
    s.oracle_steps = detail::snapped_ceil(std::exp(-log_gamma_i / (1.0 - a)));
    s.forced_steps = detail::snapped_ceil(std::exp(-2.0 * log_gamma_i));
    return s;
}

/// r_tot / (T' + k) - sqrt((k^zeta + D) / (T' + k)), with 0^zeta = 0.
inline double lite_lcb(double r_tot, std::int64_t forced, std::int64_t k, double zeta, double radius_constant,
                       double radius_scale = 1.0)
{
    const std::int64_t n = forced + k;
    if (n <= 0)
        return -std::numeric_limits<double>::infinity();
    const double nn = static_cast<double>(n);
    const double kz = k > 0 ? std::pow(static_cast<double>(k), zeta) : 0.0;
    return r_tot / nn - radius_scale * std::sqrt((kz + radius_constant) / nn);
}

/// One SELECT-LITE episode of cfg.base.horizon steps.
inline RunTrace run_select_lite(const RewardModel& model, const LiteConfig& cfg, RandomStream& rng)
{
    validate(cfg);
    const auto& b = cfg.base;
    const auto plan = [&](int i) { return lite_schedule(i, b.params, cfg.zeta, b.gamma_scale); };
    const auto test = [&](double r_tot, std::int64_t forced, std::int64_t k) {
        return lite_lcb(r_tot, forced, k, cfg.zeta, cfg.radius_constant, b.radius_scale);
    };
    return detail::run_round_loop(model, b.oracle, b.oracle_config, b.horizon, b.S, b.ablation, plan, test, rng);
}

} // namespace satisficing
