#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "satisficing/env.hpp"
#include "satisficing/oracles.hpp"
#include "satisficing/rng.hpp"
#include "satisficing/select.hpp"
#include "satisficing/select_lite.hpp"
#include "satisficing/select_lite_plus.hpp"
#include "satisficing/stats.hpp"

namespace satisficing {

enum class Algorithm { Select, SelectLite, SelectLitePlus, OracleOnly };

inline const char* to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::Select: return "select";
    case Algorithm::SelectLite: return "select_lite";
    case Algorithm::SelectLitePlus: return "select_lite_plus";
    case Algorithm::OracleOnly: return "oracle_only";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s)
{
    if (s == "select") return Algorithm::Select;
    if (s == "select_lite") return Algorithm::SelectLite;
    if (s == "select_lite_plus" || s == "lite-plus") return Algorithm::SelectLitePlus;
    if (s == "oracle_only") return Algorithm::OracleOnly;
    throw ConfigError("unknown algorithm: " + std::string(s));
}

// --- presets ------------------------------------------------------------------

struct Preset {
    std::string name;
    RewardModel model;
    double S = 0.0;
    OracleKind oracle = OracleKind::Thompson;
    std::vector<std::int64_t> horizons;
    int replications = 1000;
    double zeta = 0.1;
    std::string description;
};

inline std::vector<std::int64_t> horizon_grid(std::int64_t from, std::int64_t to, std::int64_t step)
{
    std::vector<std::int64_t> out;
    for (std::int64_t t = from; t <= to; t += step)
        out.push_back(t);
    return out;
}

inline std::vector<Preset> presets()
{
    const auto karm = make_finite({0.6, 0.7, 0.8, 1.0}, 1.0, "karm");
    const auto tail = make_finite({0.2, 0.4, 0.6, 0.8}, 1.0, "karm-tail");
    const auto h500 = horizon_grid(500, 5000, 500);
    const auto h1000 = horizon_grid(1000, 10000, 1000);
    return {
        {"karm-realizable", karm, 0.93, OracleKind::Thompson, h500, 1000, 0.1, "4 arms {0.6,0.7,0.8,1}, S=0.93"},
        {"karm-nonrealizable", karm, 1.5, OracleKind::Thompson, h500, 1000, 0.1, "4 arms {0.6,0.7,0.8,1}, S=1.5"},
        {"concave-realizable", make_concave_instance(), 0.3, OracleKind::Trisection, h500, 1000, 0.1,
         "r(x)=1-16(x-0.25)^2 on [0,1], S=0.3"},
        {"concave-nonrealizable", make_concave_instance(), 1.5, OracleKind::Trisection, h500, 1000, 0.1,
         "r(x)=1-16(x-0.25)^2 on [0,1], S=1.5"},
        {"lipschitz-realizable", make_lipschitz_instance(), 0.5, OracleKind::UniformUcb, h500, 1000, 0.1,
         "min{1,3exp(-100|x-(0.5,0.7)|^2)} on [0,1]^2, S=0.5"},
        {"lipschitz-nonrealizable", make_lipschitz_instance(), 1.5, OracleKind::UniformUcb, h500, 1000, 0.1,
         "min{1,3exp(-100|x-(0.5,0.7)|^2)} on [0,1]^2, S=1.5"},
        {"lipschitz-ablation", make_lipschitz_instance(), 0.7, OracleKind::UniformUcb, h500, 1000, 0.1,
         "Lipschitz instance, S=0.7"},
        {"tail", tail, 0.7, OracleKind::Thompson, h1000, 1000, 0.1, "4 arms {0.2,0.4,0.6,0.8}, S=0.7"},
        {"tail-nonrealizable", tail, 1.5, OracleKind::Thompson, h1000, 1000, 0.1, "4 arms {0.2,0.4,0.6,0.8}, S=1.5"},
        {"pricing", make_pricing_instance(), 8.0, OracleKind::LinUcb, horizon_grid(500, 8000, 500), 1000, 0.1,
         "linear-demand pricing g=32724/4100, h=7678/4100, p in [0,4], S=8"},
        {"pricing-nonrealizable", make_pricing_instance(), 10.0, OracleKind::LinUcb, h500, 1000, 0.1,
         "linear-demand pricing, S=10"},
        {"two-arm", make_finite({1.0, 0.0}, 1.0, "two-arm"), 0.5, OracleKind::Thompson, {2000}, 1000, 0.1,
         "arms {1,0}, S=0.5"},
    };
}

inline Preset find_preset(std::string_view name)
{
    for (auto& p : presets())
        if (p.name == name)
            return p;
    throw ConfigError("unknown preset: " + std::string(name));
}

// --- experiments --------------------------------------------------------------

struct ExperimentSpec {
    std::string preset = "custom";
    std::string label; // algorithm label in the CSV; defaults to the algorithm name
    RewardModel model;
    Algorithm algorithm = Algorithm::Select;
    OracleKind oracle = OracleKind::Thompson;
    OracleConfig oracle_config;
    double S = 0.0;
    std::vector<std::int64_t> horizons;
    int replications = 1;
    std::uint64_t base_seed = 1;
    double zeta = 0.1;
    double gamma_scale = 1.0;
    double radius_scale = 1.0;
    Ablation ablation = Ablation::Full;
    unsigned threads = 0; // 0: hardware concurrency

    std::string algorithm_label() const { return label.empty() ? to_string(algorithm) : label; }
};

inline ExperimentSpec spec_from_preset(const Preset& p, Algorithm algorithm)
{
    ExperimentSpec s;
    s.preset = p.name;
    s.model = p.model;
    s.algorithm = algorithm;
    s.oracle = p.oracle;
    s.S = p.S;
    s.horizons = p.horizons;
    s.replications = p.replications;
    s.zeta = p.zeta;
    return s;
}

inline void validate(const ExperimentSpec& spec)
{
    validate(spec.model);
    if (spec.replications < 1)
        throw ConfigError("replications must be >= 1");
    if (spec.horizons.empty())
        throw ConfigError("at least one horizon required");
    for (auto t : spec.horizons)
        if (t < 1)
            throw ConfigError("horizons must be positive");
    if (!compatible(spec.oracle, spec.model.kind()))
        throw ConfigError(std::string("oracle ") + to_string(spec.oracle) + " cannot run on a " +
                          to_string(spec.model.kind()) + " model");
    if (spec.algorithm == Algorithm::SelectLitePlus && !spec.model.is_finite())
        throw ConfigError("select_lite_plus requires a finite-armed instance");
    if ((spec.algorithm == Algorithm::SelectLite || spec.algorithm == Algorithm::SelectLitePlus) &&
        !(spec.zeta > 0.0 && spec.zeta < 1.0))
        throw ConfigError("zeta must lie in (0, 1)");
}

inline SelectConfig select_config(const ExperimentSpec& spec, std::int64_t horizon)
{
    SelectConfig cfg;
    cfg.S = spec.S;
    cfg.oracle = spec.oracle;
    cfg.params = oracle_params(spec.oracle, spec.model, spec.oracle_config);
    cfg.oracle_config = spec.oracle_config;
    cfg.horizon = horizon;
    cfg.gamma_scale = spec.gamma_scale;
    cfg.ablation = spec.ablation;
    cfg.radius_scale = spec.radius_scale;
    return cfg;
}

/// One episode of `spec`'s algorithm for `horizon` steps from `seed`.
inline RunTrace run_episode(const ExperimentSpec& spec, std::int64_t horizon, std::uint64_t seed)
{
    RandomStream rng(seed);
    switch (spec.algorithm) {
    case Algorithm::Select: return run_select(spec.model, select_config(spec, horizon), rng);
    case Algorithm::SelectLite:
        return run_select_lite(spec.model, make_lite_config(select_config(spec, horizon), spec.zeta), rng);
    case Algorithm::SelectLitePlus:
        return run_select_lite_plus(spec.model, make_lite_config(select_config(spec, horizon), spec.zeta), rng);
    case Algorithm::OracleOnly: return run_oracle_only(spec.model, spec.oracle, spec.oracle_config, horizon, rng);
    }
    throw ConfigError("unknown algorithm");
}

struct RawRow {
    std::string algorithm;
    std::string preset;
    std::int64_t T = 0;
    int rep = 0;
    double satisficing_regret = 0.0;
    double standard_regret = 0.0;
    int rounds_used = 0;
    std::uint64_t seed = 0;
};

struct AggregateCell {
    std::string algorithm;
    std::int64_t T = 0;
    std::size_t replications = 0;
    MeanStderr satisficing;
    MeanStderr standard;
};

struct AggregateResult {
    std::vector<AggregateCell> cells;
    std::vector<RawRow> raw; // ordered by (T, rep)

    std::vector<double> satisficing_at(std::int64_t T) const
    {
        std::vector<double> out;
        for (const auto& r : raw)
            if (r.T == T)
                out.push_back(r.satisficing_regret);
        return out;
    }

    const AggregateCell& cell(std::int64_t T) const
    {
        for (const auto& c : cells)
            if (c.T == T)
                return c;
        throw std::out_of_range("no aggregate cell for T=" + std::to_string(T));
    }
};

/// Calls fn(i) for i in [0, n) on a bounded pool of worker threads. Results
/// must be written to per-index slots; completion order is unspecified.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (threads == 0)
        threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

/// Aggregates raw rows into per-(algorithm, T) means and standard errors. A
/// pure fold: the result does not depend on row order.
inline std::vector<AggregateCell> aggregate(const std::vector<RawRow>& rows)
{
    std::map<std::pair<std::string, std::int64_t>, std::vector<std::pair<int, const RawRow*>>> groups;
    for (const auto& r : rows)
        groups[{r.algorithm, r.T}].push_back({r.rep, &r});
    std::vector<AggregateCell> cells;
    for (auto& [key, members] : groups) {
        // Sorting by replication index makes floating-point sums order-free.
        std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> sat;
        std::vector<double> std_regret;
        for (const auto& m : members) {
            sat.push_back(m.second->satisficing_regret);
            std_regret.push_back(m.second->standard_regret);
        }
        cells.push_back({key.first, key.second, members.size(), mean_stderr(sat), mean_stderr(std_regret)});
    }
    return cells;
}

/// Runs every (horizon, replication) pair of `spec`. Replication r uses seed
/// derive_seed(base_seed, r) at every horizon, so runs at different horizons
/// share their random streams.
inline AggregateResult run_experiment(const ExperimentSpec& spec)
{
    validate(spec);
    const auto reps = static_cast<std::size_t>(spec.replications);
    const std::size_t jobs = spec.horizons.size() * reps;
    std::vector<RawRow> rows(jobs);
    const std::string label = spec.algorithm_label();
    parallel_for(jobs, spec.threads, [&](std::size_t job) {
        const std::int64_t T = spec.horizons[job / reps];
        const int rep = static_cast<int>(job % reps);
        const std::uint64_t seed = derive_seed(spec.base_seed, static_cast<std::uint64_t>(rep));
        const RunTrace trace = run_episode(spec, T, seed);
        const RegretSummary sum = summarize(spec.model, trace, spec.S);
        rows[job] = {label, spec.preset, T, rep, sum.satisficing_regret, sum.standard_regret, sum.rounds_used, seed};
    });
    AggregateResult out;
    out.cells = aggregate(rows);
    out.raw = std::move(rows);
    return out;
}

/// Frequency of satisficing regret >= T / 6 in `result` at horizon T.
inline double heavy_tail_frequency(const AggregateResult& result, std::int64_t T)
{
    const auto sample = result.satisficing_at(T);
    if (sample.empty())
        throw std::invalid_argument("heavy_tail_frequency: no runs at this horizon");
    const double threshold = static_cast<double>(T) / 6.0;
    const auto hits = std::count_if(sample.begin(), sample.end(), [&](double x) { return x >= threshold; });
    return static_cast<double>(hits) / static_cast<double>(sample.size());
}

// --- pricing calibration ------------------------------------------------------

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PricingFit {
    double g = 0.0;
    double h = 0.0;
    double sigma = 0.0;
    bool normalized = false;
    std::vector<std::string> warnings;
    RewardModel model;
};

/// Ordinary least squares fit of volume = g - h * price. sigma is the
/// residual standard deviation with n - 2 degrees of freedom (0 for two
/// points). The returned model divides g and h by sigma when sigma > 0 and
/// uses the price domain [0, 4].
inline PricingFit calibrate_pricing(std::span<const std::pair<double, double>> rows, double price_lo = 0.0,
                                    double price_hi = 4.0)
{
    if (rows.size() < 2)
        throw CalibrationError("calibration needs at least two (price, volume) rows");
    const double n = static_cast<double>(rows.size());
    double mp = 0.0;
    double mv = 0.0;
    for (const auto& [p, v] : rows) {
        mp += p;
        mv += v;
    }
    mp /= n;
    mv /= n;
    double spp = 0.0;
    double spv = 0.0;
    for (const auto& [p, v] : rows) {
        spp += (p - mp) * (p - mp);
        spv += (p - mp) * (v - mv);
    }
    if (!(spp > 1e-12 * std::max(1.0, mp * mp) * n))
        throw CalibrationError("degenerate design: prices are constant");
    const double slope = spv / spp;
    PricingFit fit;
    fit.g = mv - slope * mp;
    fit.h = -slope;
    double ssr = 0.0;
    for (const auto& [p, v] : rows) {
        const double e = v - (fit.g - fit.h * p);
        ssr += e * e;
    }
    fit.sigma = rows.size() > 2 ? std::sqrt(ssr / (n - 2.0)) : 0.0;
    const double scale = std::max(std::abs(mv), 1.0);
    if (rows.size() < 3)
        fit.warnings.emplace_back("fewer than three rows: residual deviation undefined, set to 0");
    if (fit.sigma <= 1e-9 * scale) {
        fit.sigma = 0.0;
        fit.warnings.emplace_back("zero residual noise: normalization skipped");
        fit.model = {LinearPricing{fit.g, fit.h, price_lo, price_hi}, 0.0, "pricing-calibrated"};
    } else {
        fit.normalized = true;
        fit.model = {LinearPricing{fit.g / fit.sigma, fit.h / fit.sigma, price_lo, price_hi}, 1.0, "pricing-calibrated"};
    }
    return fit;
}

/// Reads (price, volume) rows from a CSV file. A header line is skipped when
/// its first field is not numeric; extra columns are ignored.
inline std::vector<std::pair<double, double>> read_price_volume_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::stringstream ss(line);
        std::string a;
        std::string b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected price,volume");
        try {
            std::size_t used = 0;
            const double p = std::stod(a, &used);
            const double v = std::stod(b);
            rows.emplace_back(p, v);
        } catch (const std::invalid_argument&) {
            if (lineno == 1)
                continue;
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": non-numeric field");
        }
    }
    return rows;
}

// --- CSV output -----------------------------------------------------------------

inline constexpr std::string_view kRawSchema = "raw/v1";
inline constexpr std::string_view kAggregateSchema = "aggregate/v1";

inline std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows)
{
    out << "algorithm,preset,T,rep,satisficing_regret,standard_regret,rounds_used,seed\n";
    for (const auto& r : rows)
        out << r.algorithm << ',' << r.preset << ',' << r.T << ',' << r.rep << ',' << format_double(r.satisficing_regret)
            << ',' << format_double(r.standard_regret) << ',' << r.rounds_used << ',' << r.seed << '\n';
}

inline void write_aggregate_csv(std::ostream& out, const std::vector<AggregateCell>& cells)
{
    out << "algorithm,T,replications,mean_satisficing_regret,stderr_satisficing_regret,mean_standard_regret,"
           "stderr_standard_regret\n";
    for (const auto& c : cells)
        out << c.algorithm << ',' << c.T << ',' << c.replications << ',' << format_double(c.satisficing.mean) << ','
            << format_double(c.satisficing.stderr_) << ',' << format_double(c.standard.mean) << ','
            << format_double(c.standard.stderr_) << '\n';
}

inline void write_histogram_csv(std::ostream& out, const std::string& algorithm, const Histogram& h)
{
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << algorithm << ',' << format_double(h.origin + h.bin_width * static_cast<double>(b)) << ','
            << format_double(h.origin + h.bin_width * static_cast<double>(b + 1)) << ',' << h.counts[b] << '\n';
}

inline void write_exceedance_csv(std::ostream& out, const std::string& algorithm,
                                 const std::vector<ExceedancePoint>& curve)
{
    for (const auto& p : curve)
        out << algorithm << ',' << format_double(p.x) << ',' << format_double(p.prob.estimate) << ','
            << format_double(p.prob.lo) << ',' << format_double(p.prob.hi) << '\n';
}

/// Opens `path` for writing, creating parent directories. Errors carry the path.
inline std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace satisficing
