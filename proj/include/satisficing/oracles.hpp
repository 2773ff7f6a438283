#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "satisficing/env.hpp"
#include "satisficing/rng.hpp"

namespace satisficing {

// Raised for an oracle/model pairing or parameter set that cannot run.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when a session's select/observe protocol is violated.
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

// Constants of the sublinear regret bound C1 t^alpha log(t)^beta.
struct OracleParams {
    double C1 = 1.0;
    double alpha = 0.5;
    double beta = 0.5;
};

inline void validate(const OracleParams& p)
{
    if (!(p.C1 >= 1.0))
        throw ConfigError("oracle params: C1 must be >= 1");
    if (!(p.alpha >= 0.5 && p.alpha < 1.0))
        throw ConfigError("oracle params: alpha must lie in [1/2, 1)");
    if (!(p.beta >= 0.0))
        throw ConfigError("oracle params: beta must be >= 0");
}

enum class OracleKind { Ucb, Thompson, UniformUcb, Trisection, LinUcb };

inline const char* to_string(OracleKind k)
{
    switch (k) {
    case OracleKind::Ucb: return "ucb";
    case OracleKind::Thompson: return "thompson";
    case OracleKind::UniformUcb: return "uniform_ucb";
    case OracleKind::Trisection: return "trisection";
    case OracleKind::LinUcb: return "linucb";
    }
    return "?";
}

inline OracleKind parse_oracle_kind(std::string_view s)
{
    if (s == "ucb") return OracleKind::Ucb;
    if (s == "thompson") return OracleKind::Thompson;
    if (s == "uniform_ucb") return OracleKind::UniformUcb;
    if (s == "trisection") return OracleKind::Trisection;
    if (s == "linucb") return OracleKind::LinUcb;
    throw ConfigError("unknown oracle kind: " + std::string(s));
}

inline OracleKind default_oracle(ModelKind k)
{
    switch (k) {
    case ModelKind::Finite: return OracleKind::Thompson;
    case ModelKind::Concave1D: return OracleKind::Trisection;
    case ModelKind::Lipschitz: return OracleKind::UniformUcb;
    case ModelKind::LinearPricing: return OracleKind::LinUcb;
    }
    return OracleKind::Ucb;
}

// Hyperparameters of the concrete oracles. All defaults are written to the
// run manifest.
struct OracleConfig {
    double thompson_prior_var = 1.0;
    int pricing_grid_points = 401;
    double ridge = 1.0;
    double linucb_width_offset = 1.0;
    double linucb_C1 = 1.0;
};

inline bool compatible(OracleKind oracle, ModelKind model)
{
    switch (oracle) {
    case OracleKind::Ucb:
    case OracleKind::Thompson: return model == ModelKind::Finite;
    case OracleKind::UniformUcb: return model == ModelKind::Lipschitz || model == ModelKind::Concave1D;
    case OracleKind::Trisection: return model == ModelKind::Concave1D;
    case OracleKind::LinUcb: return model == ModelKind::LinearPricing;
    }
    return false;
}

// Uniform-discretization grid count per axis: ceil((L^2 t / log max(t,3))^(1/(d+2))).
inline std::int64_t uniform_grid_per_axis(double lipschitz, std::size_t dim, std::int64_t t)
{
    const double tt = static_cast<double>(t);
    const double base = lipschitz * lipschitz * tt / std::log(std::max(tt, 3.0));
    const auto m = static_cast<std::int64_t>(std::ceil(std::pow(base, 1.0 / (static_cast<double>(dim) + 2.0))));
    return std::max<std::int64_t>(m, 1);
}

inline double model_lipschitz(const RewardModel& model)
{
    switch (model.kind()) {
    case ModelKind::Lipschitz: return std::get<GaussianBump>(model.params).lipschitz;
    case ModelKind::Concave1D: {
        const auto& c = std::get<ConcaveQuadratic>(model.params);
        return std::max(2.0 * c.curvature * std::max(std::abs(c.hi - c.vertex), std::abs(c.vertex - c.lo)), 1e-12);
    }
    default: return 1.0;
    }
}

/// Regret-bound constants of `kind` on `model`.
inline OracleParams oracle_params(OracleKind kind, const RewardModel& model, const OracleConfig& cfg = {})
{
    switch (kind) {
    case OracleKind::Ucb:
    case OracleKind::Thompson:
        return {11.0 * std::sqrt(static_cast<double>(std::max<std::size_t>(model.num_arms(), 1))), 0.5, 0.5};
    case OracleKind::Trisection: return {108.0 / std::log(4.0 / 3.0), 0.5, 1.5};
    case OracleKind::UniformUcb: {
        const double d = static_cast<double>(model.dim());
        return {12.0 * std::pow(model_lipschitz(model), d / (d + 2.0)), (d + 1.0) / (d + 2.0), 0.5};
    }
    case OracleKind::LinUcb: return {std::max(cfg.linucb_C1, 1.0), 0.5, 1.0};
    }
    throw ConfigError("oracle_params: unknown oracle kind");
}

struct TrajectoryEntry {
    Arm arm;
    double reward = 0.0;
};

// A standard-regret learner run for a fixed horizon. Strict alternation of
// select_arm() and observe(); no steps past the horizon.
class OracleSession {
public:
    OracleSession(std::int64_t horizon, RandomStream& rng) : horizon_(horizon), rng_(&rng)
    {
        if (horizon < 2)
            throw ConfigError("oracle session horizon must be >= 2");
        trajectory_.reserve(static_cast<std::size_t>(std::min<std::int64_t>(horizon, 1 << 16)));
    }
    virtual ~OracleSession() = default;
    OracleSession(const OracleSession&) = delete;
    OracleSession& operator=(const OracleSession&) = delete;

    Arm select_arm()
    {
        if (pending_)
            throw UsageError("select_arm called twice without observe");
        if (exhausted())
            throw UsageError("oracle session exhausted");
        pending_arm_ = choose(*rng_);
        pending_ = true;
        return pending_arm_;
    }

    void observe(double reward)
    {
        if (!pending_)
            throw UsageError("observe called without a preceding select_arm");
        pending_ = false;
        trajectory_.push_back({pending_arm_, reward});
        update(pending_arm_, reward);
    }

    std::int64_t horizon() const noexcept { return horizon_; }
    std::int64_t steps_taken() const noexcept { return static_cast<std::int64_t>(trajectory_.size()); }
    bool exhausted() const noexcept { return steps_taken() >= horizon_; }
    const std::vector<TrajectoryEntry>& trajectory() const noexcept { return trajectory_; }

    // Whether the learner's standard-regret distribution is known to be
    // light-tailed. None of the bundled oracles claim it.
    virtual bool light_tailed() const noexcept { return false; }

protected:
    virtual Arm choose(RandomStream& rng) = 0;
    virtual void update(const Arm& arm, double reward) = 0;

    // Current step, 1-based, of the pending selection.
    std::int64_t step() const noexcept { return steps_taken() + 1; }

private:
    std::int64_t horizon_;
    RandomStream* rng_;
    std::vector<TrajectoryEntry> trajectory_;
    Arm pending_arm_;
    bool pending_ = false;
};

namespace detail {

// Index of the largest value, lowest index on ties.
inline std::size_t argmax(const std::vector<double>& v)
{
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Shared bookkeeping for finite-armed learners.
struct ArmStats {
    std::vector<std::int64_t> counts;
    std::vector<double> sums;

    explicit ArmStats(std::size_t k) : counts(k, 0), sums(k, 0.0) {}
    std::size_t size() const noexcept { return counts.size(); }
    void add(std::size_t k, double r)
    {
        ++counts[k];
        sums[k] += r;
    }
};

} // namespace detail

/// UCB over K arms: one initialization pull per arm in index order, then
/// argmax of mean + sqrt(2 log(1 + t log^2 t) / n_k) with t the session
/// horizon. Ties go to the lowest index.
class FiniteUcbSession : public OracleSession {
public:
    FiniteUcbSession(std::size_t num_arms, std::int64_t horizon, RandomStream& rng)
        : OracleSession(horizon, rng), stats_(num_arms), index_(num_arms, 0.0)
    {
        if (num_arms == 0)
            throw ConfigError("ucb: at least one arm required");
        const double t = static_cast<double>(horizon);
        const double lt = std::log(t);
        log_f_ = std::log(1.0 + t * lt * lt);
    }

    std::size_t num_arms() const noexcept { return stats_.size(); }
    const std::vector<double>& last_indices() const noexcept { return index_; }
    const detail::ArmStats& stats() const noexcept { return stats_; }

protected:
    Arm choose(RandomStream&) override { return Arm::index(choose_index()); }
    void update(const Arm& arm, double reward) override { stats_.add(arm.idx(), reward); }

    std::size_t choose_index()
    {
        const auto k = stats_.size();
        const auto s = static_cast<std::size_t>(steps_taken());
        if (s < k) {
            std::fill(index_.begin(), index_.end(), 0.0);
            index_[s] = std::numeric_limits<double>::infinity();
            return s;
        }
        for (std::size_t a = 0; a < k; ++a) {
            const double n = static_cast<double>(stats_.counts[a]);
            index_[a] = stats_.sums[a] / n + std::sqrt(2.0 * log_f_ / n);
        }
        return detail::argmax(index_);
    }

private:
    detail::ArmStats stats_;
    std::vector<double> index_;
    double log_f_ = 0.0;
};

/// Gaussian Thompson sampling with N(0, v) prior and unit-variance
/// likelihood; with v = 1 the posterior is N(sum / (n + 1), 1 / (n + 1)).
class ThompsonSession : public OracleSession {
public:
    ThompsonSession(std::size_t num_arms, std::int64_t horizon, RandomStream& rng, double prior_var = 1.0)
        : OracleSession(horizon, rng), stats_(num_arms), draws_(num_arms, 0.0), prior_precision_(1.0 / prior_var)
    {
        if (num_arms == 0)
            throw ConfigError("thompson: at least one arm required");
        if (!(prior_var > 0.0))
            throw ConfigError("thompson: prior variance must be positive");
    }

    const detail::ArmStats& stats() const noexcept { return stats_; }

protected:
    Arm choose(RandomStream& rng) override
    {
        for (std::size_t a = 0; a < stats_.size(); ++a) {
            const double precision = prior_precision_ + static_cast<double>(stats_.counts[a]);
            draws_[a] = stats_.sums[a] / precision + rng.normal() / std::sqrt(precision);
        }
        return Arm::index(detail::argmax(draws_));
    }
    void update(const Arm& arm, double reward) override { stats_.add(arm.idx(), reward); }

private:
    detail::ArmStats stats_;
    std::vector<double> draws_;
    double prior_precision_;
};

/// Finite UCB over the centers of a uniform m^d grid of the domain box.
class UniformUcbSession : public OracleSession {
public:
    UniformUcbSession(std::size_t dim, double lo, double hi, double lipschitz, std::int64_t horizon, RandomStream& rng)
        : OracleSession(horizon, rng), dim_(dim), lo_(lo), hi_(hi),
          per_axis_(uniform_grid_per_axis(lipschitz, dim, horizon)),
          ucb_(static_cast<std::size_t>(std::pow(static_cast<double>(per_axis_), static_cast<double>(dim)) + 0.5), horizon, rng)
    {
    }

    std::int64_t per_axis() const noexcept { return per_axis_; }
    std::size_t num_cells() const noexcept { return ucb_.num_arms(); }

    Arm cell_center(std::size_t cell) const
    {
        std::array<double, kMaxArmDim> x{};
        const double width = (hi_ - lo_) / static_cast<double>(per_axis_);
        for (std::size_t i = 0; i < dim_; ++i) {
            const auto j = cell % static_cast<std::size_t>(per_axis_);
            cell /= static_cast<std::size_t>(per_axis_);
            x[i] = lo_ + (static_cast<double>(j) + 0.5) * width;
        }
        return Arm::point(std::span<const double>(x.data(), dim_));
    }

protected:
    Arm choose(RandomStream&) override
    {
        cell_ = ucb_.select_arm().idx();
        return cell_center(cell_);
    }
    void update(const Arm&, double reward) override { ucb_.observe(reward); }

private:
    std::size_t dim_;
    double lo_;
    double hi_;
    std::int64_t per_axis_;
    FiniteUcbSession ucb_;
    std::size_t cell_ = 0;
};

/// Epoch-based trisection for concave rewards on an interval. Each epoch
/// samples the quarter points of the working interval round robin until a
/// Hoeffding test with radius sqrt(2 log t / n) shows one end point is worse
/// than another point; the outer quarter beyond each worse end point is
/// dropped. Concavity keeps the maximizer inside the working interval.
class TrisectionSession : public OracleSession {
public:
    TrisectionSession(double lo, double hi, std::int64_t horizon, RandomStream& rng)
        : OracleSession(horizon, rng), left_(lo), right_(hi), log_t_(std::log(static_cast<double>(horizon)))
    {
    }

    double left() const noexcept { return left_; }
    double right() const noexcept { return right_; }
    int epochs_completed() const noexcept { return epochs_; }

protected:
    Arm choose(RandomStream&) override
    {
        const double w = right_ - left_;
        return Arm::scalar(left_ + w * 0.25 * static_cast<double>(next_ + 1));
    }

    void update(const Arm&, double reward) override
    {
        sums_[next_] += reward;
        next_ = (next_ + 1) % 3;
        if (next_ == 0) {
            ++n_;
            test();
        }
    }

private:
    void test()
    {
        const double n = static_cast<double>(n_);
        const double rad = std::sqrt(2.0 * log_t_ / n);
        const double ml = sums_[0] / n;
        const double mc = sums_[1] / n;
        const double mr = sums_[2] / n;
        const bool left_worse = ml + rad < mc - rad || ml + rad < mr - rad;
        const bool right_worse = mr + rad < mc - rad || mr + rad < ml - rad;
        if (!left_worse && !right_worse)
            return;
        const double w = right_ - left_;
        const double new_left = left_worse ? left_ + 0.25 * w : left_;
        const double new_right = right_worse ? right_ - 0.25 * w : right_;
        left_ = new_left;
        right_ = new_right;
        sums_ = {0.0, 0.0, 0.0};
        n_ = 0;
        ++epochs_;
    }

    double left_;
    double right_;
    double log_t_;
    std::array<double, 3> sums_{0.0, 0.0, 0.0};
    std::int64_t n_ = 0;
    int next_ = 0;
    int epochs_ = 0;
};

/// Optimistic linear bandit for linear-demand pricing. Mean revenue is
/// theta . phi(p) with theta = (g, h) and phi(p) = (p, -p^2); a ridge estimate
/// and its confidence ellipsoid are maintained in closed form (2x2).
class LinUcbPricingSession : public OracleSession {
public:
    LinUcbPricingSession(double lo, double hi, int grid_points, double ridge, double width_offset, std::int64_t horizon,
                         RandomStream& rng)
        : OracleSession(horizon, rng), width_(std::sqrt(2.0 * std::log(static_cast<double>(horizon))) + width_offset)
    {
        if (grid_points < 2)
            throw ConfigError("linucb: price grid needs at least two points");
        if (!(ridge > 0.0))
            throw ConfigError("linucb: ridge must be positive");
        prices_.resize(static_cast<std::size_t>(grid_points));
        for (int i = 0; i < grid_points; ++i)
            prices_[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_points - 1);
        v_ = {ridge, 0.0, ridge};
        score_.resize(prices_.size());
    }

    const std::vector<double>& prices() const noexcept { return prices_; }

    // Ridge estimate of (g, h).
    std::array<double, 2> theta() const
    {
        const double det = v_[0] * v_[2] - v_[1] * v_[1];
        return {(v_[2] * b_[0] - v_[1] * b_[1]) / det, (v_[0] * b_[1] - v_[1] * b_[0]) / det};
    }

protected:
    Arm choose(RandomStream&) override
    {
        const auto th = theta();
        const double det = v_[0] * v_[2] - v_[1] * v_[1];
        for (std::size_t i = 0; i < prices_.size(); ++i) {
            const double f0 = prices_[i];
            const double f1 = -prices_[i] * prices_[i];
            // phi^T V^{-1} phi with V^{-1} = [v2 -v1; -v1 v0] / det
            const double quad = (v_[2] * f0 * f0 - 2.0 * v_[1] * f0 * f1 + v_[0] * f1 * f1) / det;
            score_[i] = th[0] * f0 + th[1] * f1 + width_ * std::sqrt(std::max(quad, 0.0));
        }
        return Arm::scalar(prices_[detail::argmax(score_)]);
    }

    void update(const Arm& arm, double reward) override
    {
        const double f0 = arm.x();
        const double f1 = -arm.x() * arm.x();
        v_[0] += f0 * f0;
        v_[1] += f0 * f1;
        v_[2] += f1 * f1;
        b_[0] += f0 * reward;
        b_[1] += f1 * reward;
    }

private:
    double width_;
    std::vector<double> prices_;
    std::vector<double> score_;
    std::array<double, 3> v_{}; // symmetric 2x2: (0,0), (0,1), (1,1)
    std::array<double, 2> b_{};
};

/// Fresh session of `kind` on `model` with horizon t. Throws ConfigError for
/// an incompatible pairing or t < 2.
inline std::unique_ptr<OracleSession> new_session(OracleKind kind, const RewardModel& model, std::int64_t horizon,
                                                  RandomStream& rng, const OracleConfig& cfg = {})
{
    if (!compatible(kind, model.kind()))
        throw ConfigError(std::string("oracle ") + to_string(kind) + " cannot run on a " + to_string(model.kind()) +
                          " model");
    if (horizon < 2)
        throw ConfigError("oracle session horizon must be >= 2");
    const auto [lo, hi] = model.box();
    switch (kind) {
    case OracleKind::Ucb: return std::make_unique<FiniteUcbSession>(model.num_arms(), horizon, rng);
    case OracleKind::Thompson:
        return std::make_unique<ThompsonSession>(model.num_arms(), horizon, rng, cfg.thompson_prior_var);
    case OracleKind::UniformUcb:
        return std::make_unique<UniformUcbSession>(model.dim(), lo, hi, model_lipschitz(model), horizon, rng);
    case OracleKind::Trisection: return std::make_unique<TrisectionSession>(lo, hi, horizon, rng);
    case OracleKind::LinUcb:
        return std::make_unique<LinUcbPricingSession>(lo, hi, cfg.pricing_grid_points, cfg.ridge,
                                                      cfg.linucb_width_offset, horizon, rng);
    }
    throw ConfigError("new_session: unknown oracle kind");
}

} // namespace satisficing
