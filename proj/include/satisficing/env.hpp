#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "satisficing/rng.hpp"

namespace satisficing {

inline constexpr std::size_t kMaxArmDim = 4;

// An arm is either an index into a finite arm set or a point of a continuum
// arm set (dimension at most kMaxArmDim).
class Arm {
public:
    Arm() = default;

    static Arm index(std::size_t k)
    {
        Arm a;
        a.index_ = k;
        return a;
    }

    static Arm point(std::span<const double> x)
    {
        if (x.empty() || x.size() > kMaxArmDim)
            throw std::invalid_argument("Arm::point: dimension must be in [1, 4]");
        Arm a;
        a.dim_ = x.size();
        std::copy(x.begin(), x.end(), a.coords_.begin());
        return a;
    }

    static Arm point(std::initializer_list<double> x) { return point(std::span<const double>(x.begin(), x.size())); }

    static Arm scalar(double x) { return point({x}); }

    bool is_index() const noexcept { return dim_ == 0; }
    std::size_t idx() const noexcept { return index_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> coords() const noexcept { return {coords_.data(), dim_}; }
    double x() const noexcept { return coords_[0]; }

    friend bool operator==(const Arm& a, const Arm& b) noexcept
    {
        if (a.dim_ != b.dim_)
            return false;
        if (a.dim_ == 0)
            return a.index_ == b.index_;
        return std::equal(a.coords_.begin(), a.coords_.begin() + a.dim_, b.coords_.begin());
    }

private:
    std::size_t index_ = 0;
    std::size_t dim_ = 0;
    std::array<double, kMaxArmDim> coords_{};
};

// --- reward model kinds -----------------------------------------------------

struct FiniteArms {
    std::vector<double> means;
};

// r(x) = peak - curvature * (x - vertex)^2 on [lo, hi], curvature >= 0.
struct ConcaveQuadratic {
    double peak = 1.0;
    double curvature = 1.0;
    double vertex = 0.5;
    double lo = 0.0;
    double hi = 1.0;
};

// r(x) = min{cap, height * exp(-width * |x - center|_2^2)} on [0, 1]^d.
// `lipschitz` is the declared constant with respect to the sup-norm.
struct GaussianBump {
    std::vector<double> center;
    double height = 1.0;
    double width = 1.0;
    double cap = 1.0;
    double lipschitz = 1.0;
};

// Revenue p * (g - h p) over prices p in [lo, hi]. Observed revenue is
// p * (g - h p + noise), so the noise scale grows with the price.
struct LinearPricing {
    double g = 1.0;
    double h = 1.0;
    double lo = 0.0;
    double hi = 1.0;
};

enum class ModelKind { Finite, Concave1D, Lipschitz, LinearPricing };

struct RewardModel {
    std::variant<FiniteArms, ConcaveQuadratic, GaussianBump, LinearPricing> params;
    double noise_std = 1.0;
    std::string name;

    ModelKind kind() const noexcept { return static_cast<ModelKind>(params.index()); }
    bool is_finite() const noexcept { return kind() == ModelKind::Finite; }

    std::size_t num_arms() const
    {
        if (const auto* f = std::get_if<FiniteArms>(&params))
            return f->means.size();
        return 0;
    }

    // Dimension of the arm space; 0 for finite arm sets.
    std::size_t dim() const
    {
        switch (kind()) {
        case ModelKind::Finite: return 0;
        case ModelKind::Lipschitz: return std::get<GaussianBump>(params).center.size();
        default: return 1;
        }
    }

    // Axis-aligned domain box of a continuum arm set.
    std::pair<double, double> box() const
    {
        switch (kind()) {
        case ModelKind::Concave1D: {
            const auto& c = std::get<ConcaveQuadratic>(params);
            return {c.lo, c.hi};
        }
        case ModelKind::LinearPricing: {
            const auto& p = std::get<LinearPricing>(params);
            return {p.lo, p.hi};
        }
        case ModelKind::Lipschitz: return {0.0, 1.0};
        default: return {0.0, 0.0};
        }
    }
};

inline const char* to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::Finite: return "finite";
    case ModelKind::Concave1D: return "concave1d";
    case ModelKind::Lipschitz: return "lipschitz";
    case ModelKind::LinearPricing: return "linear_pricing";
    }
    return "?";
}

/// Throws std::invalid_argument if the model parameters are malformed.
inline void validate(const RewardModel& model)
{
    if (!(model.noise_std >= 0.0))
        throw std::invalid_argument("reward model: noise_std must be >= 0");
    switch (model.kind()) {
    case ModelKind::Finite:
        if (std::get<FiniteArms>(model.params).means.empty())
            throw std::invalid_argument("finite model: at least one arm required");
        break;
    case ModelKind::Concave1D: {
        const auto& c = std::get<ConcaveQuadratic>(model.params);
        if (!(c.curvature >= 0.0))
            throw std::invalid_argument("concave model: curvature must be >= 0");
        if (!(c.lo < c.hi))
            throw std::invalid_argument("concave model: empty domain");
        break;
    }
    case ModelKind::Lipschitz: {
        const auto& b = std::get<GaussianBump>(model.params);
        if (b.center.empty() || b.center.size() > kMaxArmDim)
            throw std::invalid_argument("lipschitz model: dimension must be in [1, 4]");
        if (!(b.width >= 0.0) || !(b.lipschitz > 0.0))
            throw std::invalid_argument("lipschitz model: width >= 0 and L > 0 required");
        break;
    }
    case ModelKind::LinearPricing: {
        const auto& p = std::get<LinearPricing>(model.params);
        if (!(p.lo < p.hi))
            throw std::invalid_argument("pricing model: empty price domain");
        break;
    }
    }
}

// --- factories for the experiment instances ----------------------------------

inline RewardModel make_finite(std::vector<double> means, double noise_std = 1.0, std::string name = "finite")
{
    RewardModel m{FiniteArms{std::move(means)}, noise_std, std::move(name)};
    validate(m);
    return m;
}

// 1 - 16 (x - 0.25)^2 on [0, 1].
inline RewardModel make_concave_instance(double noise_std = 1.0)
{
    return {ConcaveQuadratic{1.0, 16.0, 0.25, 0.0, 1.0}, noise_std, "concave"};
}

// Sup-norm Lipschitz constant of min{1, 3 exp(-100 |x - c|^2)} in two
// dimensions: the gradient's Euclidean norm peaks at 3 sqrt(200) e^{-1/2}
// and the l1 norm is at most sqrt(2) times that, giving 60 e^{-1/2}.
inline const double kBumpLipschitz = 60.0 * std::exp(-0.5);

inline RewardModel make_lipschitz_instance(double noise_std = 1.0)
{
    return {GaussianBump{{0.5, 0.7}, 3.0, 100.0, 1.0, kBumpLipschitz}, noise_std, "lipschitz"};
}

inline constexpr double kAvocadoG = 32724.0;
inline constexpr double kAvocadoH = 7678.0;
inline constexpr double kAvocadoSigma = 4100.0;

inline RewardModel make_pricing_instance()
{
    return {LinearPricing{kAvocadoG / kAvocadoSigma, kAvocadoH / kAvocadoSigma, 0.0, 4.0}, 1.0, "pricing"};
}

// --- operations ---------------------------------------------------------------

inline void check_arm(const RewardModel& model, const Arm& arm)
{
    if (model.is_finite()) {
        if (!arm.is_index() || arm.idx() >= model.num_arms())
            throw std::domain_error("arm index out of range");
        return;
    }
    if (arm.is_index() || arm.dim() != model.dim())
        throw std::domain_error("arm dimension does not match the model");
    const auto [lo, hi] = model.box();
    for (double c : arm.coords())
        if (!(c >= lo && c <= hi))
            throw std::domain_error("arm lies outside the domain box");
}

namespace detail {

inline double mean_unchecked(const RewardModel& model, const Arm& arm)
{
    return std::visit(
        [&](const auto& p) -> double {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, FiniteArms>) {
                return p.means[arm.idx()];
            } else if constexpr (std::is_same_v<P, ConcaveQuadratic>) {
                const double d = arm.x() - p.vertex;
                return p.peak - p.curvature * d * d;
            } else if constexpr (std::is_same_v<P, GaussianBump>) {
                double r2 = 0.0;
                for (std::size_t i = 0; i < p.center.size(); ++i) {
                    const double d = arm.coords()[i] - p.center[i];
                    r2 += d * d;
                }
                return std::min(p.cap, p.height * std::exp(-p.width * r2));
            } else {
                const double price = arm.x();
                return price * (p.g - p.h * price);
            }
        },
        model.params);
}

} // namespace detail

/// Noise-free mean reward of `arm`. Throws std::domain_error for an invalid arm.
inline double mean_reward(const RewardModel& model, const Arm& arm)
{
    check_arm(model, arm);
    return detail::mean_unchecked(model, arm);
}

/// One noisy observation of `arm`.
inline double pull(const RewardModel& model, const Arm& arm, RandomStream& rng)
{
    check_arm(model, arm);
    if (model.kind() == ModelKind::LinearPricing) {
        const auto& p = std::get<LinearPricing>(model.params);
        const double price = arm.x();
        const double noise = model.noise_std > 0.0 ? model.noise_std * rng.normal() : 0.0;
        return price * (p.g - p.h * price + noise);
    }
    const double mu = detail::mean_unchecked(model, arm);
    if (model.noise_std == 0.0)
        return mu;
    return mu + model.noise_std * rng.normal();
}

/// Maximizing arm and its mean. Finite models break ties toward the lowest
/// index; continuum models use closed-form maximizers clipped to the domain.
inline std::pair<Arm, double> best_mean(const RewardModel& model)
{
    switch (model.kind()) {
    case ModelKind::Finite: {
        const auto& means = std::get<FiniteArms>(model.params).means;
        const auto it = std::max_element(means.begin(), means.end());
        return {Arm::index(static_cast<std::size_t>(it - means.begin())), *it};
    }
    case ModelKind::Concave1D: {
        const auto& c = std::get<ConcaveQuadratic>(model.params);
        const Arm a = Arm::scalar(std::clamp(c.vertex, c.lo, c.hi));
        return {a, detail::mean_unchecked(model, a)};
    }
    case ModelKind::LinearPricing: {
        const auto& p = std::get<LinearPricing>(model.params);
        const double vertex = p.h > 0.0 ? p.g / (2.0 * p.h) : (p.g >= 0.0 ? p.hi : p.lo);
        const Arm a = Arm::scalar(std::clamp(vertex, p.lo, p.hi));
        return {a, detail::mean_unchecked(model, a)};
    }
    case ModelKind::Lipschitz: {
        // Decreasing in the distance to the center, so the maximizer is the
        // projection of the center onto the unit box.
        const auto& b = std::get<GaussianBump>(model.params);
        std::array<double, kMaxArmDim> x{};
        for (std::size_t i = 0; i < b.center.size(); ++i)
            x[i] = std::clamp(b.center[i], 0.0, 1.0);
        const Arm a = Arm::point(std::span<const double>(x.data(), b.center.size()));
        return {a, detail::mean_unchecked(model, a)};
    }
    }
    throw std::logic_error("best_mean: unknown model kind");
}

/// Smallest mean over the arm space. Exact for finite, concave and pricing
/// models; for bump models the minimum sits at a box corner.
inline double worst_mean(const RewardModel& model)
{
    switch (model.kind()) {
    case ModelKind::Finite: {
        const auto& means = std::get<FiniteArms>(model.params).means;
        return *std::min_element(means.begin(), means.end());
    }
    case ModelKind::Concave1D:
    case ModelKind::LinearPricing: {
        // Both are concave in the price/point, so the minimum is at an end.
        const auto [lo, hi] = model.box();
        return std::min(detail::mean_unchecked(model, Arm::scalar(lo)), detail::mean_unchecked(model, Arm::scalar(hi)));
    }
    case ModelKind::Lipschitz: {
        const auto& b = std::get<GaussianBump>(model.params);
        const std::size_t d = b.center.size();
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            std::array<double, kMaxArmDim> x{};
            for (std::size_t i = 0; i < d; ++i)
                x[i] = (mask >> i) & 1U ? 1.0 : 0.0;
            worst = std::min(worst, detail::mean_unchecked(model, Arm::point(std::span<const double>(x.data(), d))));
        }
        return worst;
    }
    }
    throw std::logic_error("worst_mean: unknown model kind");
}

/// Uniformly random arm of the arm space.
inline Arm uniform_arm(const RewardModel& model, RandomStream& rng)
{
    if (model.is_finite())
        return Arm::index(static_cast<std::size_t>(rng.index(model.num_arms())));
    const auto [lo, hi] = model.box();
    std::array<double, kMaxArmDim> x{};
    for (std::size_t i = 0; i < model.dim(); ++i)
        x[i] = lo + (hi - lo) * rng.uniform();
    return Arm::point(std::span<const double>(x.data(), model.dim()));
}

/// Satisficing gap: smallest deficit S - r(A) over non-satisficing arms.
/// Empty when every arm is satisficing. Continuum arm sets are connected and
/// their mean functions continuous, so the gap is 0 whenever S lies inside the
/// range of r and S - max r otherwise.
inline std::optional<double> satisficing_gap(const RewardModel& model, double S)
{
    if (model.is_finite()) {
        std::optional<double> gap;
        for (double mu : std::get<FiniteArms>(model.params).means)
            if (mu < S)
                gap = std::min(gap.value_or(std::numeric_limits<double>::infinity()), S - mu);
        return gap;
    }
    const double lo = worst_mean(model);
    const double hi = best_mean(model).second;
    if (S <= lo)
        return std::nullopt;
    if (S <= hi)
        return 0.0;
    return S - hi;
}

// --- traces and regret --------------------------------------------------------

enum class Phase : std::uint8_t { OracleStep, ForcedSample, LcbTest };

inline const char* to_string(Phase p)
{
    switch (p) {
    case Phase::OracleStep: return "oracle";
    case Phase::ForcedSample: return "forced";
    case Phase::LcbTest: return "lcb";
    }
    return "?";
}

struct TraceStep {
    std::int64_t t = 0;
    Arm arm;
    double reward = 0.0;
    Phase phase = Phase::OracleStep;
    int round = 1;
};

struct RunTrace {
    std::int64_t horizon = 0;
    std::vector<TraceStep> steps;

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(steps.size()); }
    bool full() const noexcept { return size() >= horizon; }
    std::int64_t remaining() const noexcept { return horizon - size(); }
    int rounds() const noexcept { return steps.empty() ? 0 : steps.back().round; }

    void record(const Arm& arm, double reward, Phase phase, int round)
    {
        steps.push_back({size() + 1, arm, reward, phase, round});
    }
};

struct RoundRegret {
    int round = 0;
    double satisficing_regret = 0.0;
    std::int64_t oracle_steps = 0;
    std::int64_t forced_steps = 0;
    std::int64_t test_steps = 0;
};

struct RegretSummary {
    double satisficing_regret = 0.0;
    double standard_regret = 0.0;
    std::vector<RoundRegret> per_round;
    double S = 0.0;
    double best_mean = 0.0;
    double exceeding_gap = 0.0;
    std::optional<double> satisficing_gap;
    int rounds_used = 0;
};

/// Satisficing and standard regret of `trace`, with a per-round breakdown.
inline RegretSummary summarize(const RewardModel& model, const RunTrace& trace, double S)
{
    RegretSummary out;
    out.S = S;
    out.best_mean = best_mean(model).second;
    out.exceeding_gap = out.best_mean - S;
    out.satisficing_gap = satisficing_gap(model, S);

    double sum_means = 0.0;
    for (const auto& step : trace.steps) {
        const double mu = mean_reward(model, step.arm);
        const double deficit = std::max(S - mu, 0.0);
        sum_means += mu;
        out.satisficing_regret += deficit;

        if (out.per_round.empty() || out.per_round.back().round != step.round)
            out.per_round.push_back({step.round});
        auto& r = out.per_round.back();
        r.satisficing_regret += deficit;
        switch (step.phase) {
        case Phase::OracleStep: ++r.oracle_steps; break;
        case Phase::ForcedSample: ++r.forced_steps; break;
        case Phase::LcbTest: ++r.test_steps; break;
        }
    }
    out.standard_regret = static_cast<double>(trace.size()) * out.best_mean - sum_means;
    out.rounds_used = trace.rounds();
    return out;
}

} // namespace satisficing
