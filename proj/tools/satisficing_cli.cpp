// Command-line driver for the experiment harness. Every subcommand writes
// tidy CSV plus a manifest.json into --out.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satisficing.hpp"

namespace fs = std::filesystem;
using namespace satisficing;

namespace {

struct CommonOptions {
    std::string preset = "karm-realizable";
    std::string algorithm = "select";
    std::string oracle;
    std::string instance;
    std::string config;
    std::optional<double> S;
    std::optional<double> zeta;
    double gamma_scale = 1.0;
    double radius_scale = 1.0;
    std::string ablation = "full";
    std::optional<int> reps;
    std::uint64_t seed = 1;
    std::vector<std::int64_t> horizons;
    unsigned threads = 0;
    std::string out = "out";
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--preset", o.preset, "Instance preset")->capture_default_str();
    cmd->add_option("--algorithm", o.algorithm, "select | select_lite | select_lite_plus | oracle_only")
        ->capture_default_str();
    cmd->add_option("--oracle", o.oracle, "ucb | thompson | uniform_ucb | trisection | linucb (default: preset's)");
    cmd->add_option("--instance", o.instance, "Instance JSON file (overrides the preset's model and S)");
    cmd->add_option("--config", o.config, "JSON spec file applied after the preset and before flags");
    cmd->add_option("-S,--satisficing-level", o.S, "Satisficing level");
    cmd->add_option("--zeta", o.zeta, "Tail exponent for select_lite / select_lite_plus");
    cmd->add_option("--gamma-scale", o.gamma_scale, "Multiplier lambda on the gamma schedule")->capture_default_str();
    cmd->add_option("--radius-scale", o.radius_scale, "Multiplier on the LCB radius")->capture_default_str();
    cmd->add_option("--ablation", o.ablation, "full | skip_step1 | skip_step2 | skip_step3")->capture_default_str();
    cmd->add_option("--reps", o.reps, "Replications");
    cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
    cmd->add_option("--horizons", o.horizons, "Horizons T (space separated)");
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)")->capture_default_str();
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

ExperimentSpec resolve(const CommonOptions& o, CLI::App* cmd)
{
    ExperimentSpec s = spec_from_preset(find_preset(o.preset), parse_algorithm(o.algorithm));
    if (!o.config.empty()) {
        const Algorithm keep = s.algorithm;
        apply_spec_json(s, read_json_file(o.config));
        if (cmd->count("--algorithm") > 0)
            s.algorithm = keep;
    }
    if (!o.instance.empty()) {
        const json j = read_json_file(o.instance);
        s.model = model_from_json(j);
        s.preset = fs::path(o.instance).stem().string();
        if (j.contains("S"))
            s.S = j.at("S").get<double>();
        if (!compatible(s.oracle, s.model.kind()))
            s.oracle = default_oracle(s.model.kind());
    }
    if (cmd->count("--algorithm") > 0)
        s.algorithm = parse_algorithm(o.algorithm);
    if (!o.oracle.empty())
        s.oracle = parse_oracle_kind(o.oracle);
    if (o.S)
        s.S = *o.S;
    if (o.zeta)
        s.zeta = *o.zeta;
    if (cmd->count("--gamma-scale") > 0)
        s.gamma_scale = o.gamma_scale;
    if (cmd->count("--radius-scale") > 0)
        s.radius_scale = o.radius_scale;
    if (cmd->count("--ablation") > 0)
        s.ablation = parse_ablation(o.ablation);
    if (o.reps)
        s.replications = *o.reps;
    if (cmd->count("--seed") > 0 || o.config.empty())
        s.base_seed = o.seed;
    if (!o.horizons.empty())
        s.horizons = o.horizons;
    if (cmd->count("--threads") > 0)
        s.threads = o.threads;
    validate(s);
    return s;
}

struct Collected {
    std::vector<RawRow> raw;
    std::vector<AggregateCell> cells;
};

Collected run_all(const std::vector<ExperimentSpec>& specs)
{
    Collected c;
    for (const auto& s : specs) {
        auto r = run_experiment(s);
        for (const auto& cell : r.cells)
            std::fprintf(stderr, "%-28s T=%-6lld satisficing %.3f (se %.3f)  standard %.3f (se %.3f)\n",
                         cell.algorithm.c_str(), static_cast<long long>(cell.T), cell.satisficing.mean,
                         cell.satisficing.stderr_, cell.standard.mean, cell.standard.stderr_);
        c.raw.insert(c.raw.end(), r.raw.begin(), r.raw.end());
        c.cells.insert(c.cells.end(), r.cells.begin(), r.cells.end());
    }
    return c;
}

void write_outputs(const fs::path& dir, const std::string& command, const std::vector<ExperimentSpec>& specs,
                   const Collected& c)
{
    {
        auto f = open_output(dir / "raw.csv");
        write_raw_csv(f, c.raw);
    }
    {
        auto f = open_output(dir / "aggregate.csv");
        write_aggregate_csv(f, c.cells);
    }
    write_json_file(dir / "manifest.json", manifest(command, specs));
    std::fprintf(stderr, "wrote %s\n", dir.string().c_str());
}

int cmd_experiment(const std::string& name, const CommonOptions& o, CLI::App* cmd, bool single_horizon)
{
    auto s = resolve(o, cmd);
    if (single_horizon && s.horizons.size() > 1)
        s.horizons = {s.horizons.back()};
    const std::vector<ExperimentSpec> specs{s};
    write_outputs(o.out, name, specs, run_all(specs));
    return 0;
}

int cmd_tail(const CommonOptions& o, CLI::App* cmd, double bin_width)
{
    CommonOptions base = o;
    auto s = resolve(base, cmd);
    s.horizons = {s.horizons.back()};
    const std::int64_t T = s.horizons.front();
    std::vector<ExperimentSpec> specs;
    for (auto alg : {Algorithm::Select, Algorithm::SelectLite}) {
        auto v = s;
        v.algorithm = alg;
        specs.push_back(v);
    }
    if (s.model.is_finite()) {
        auto v = s;
        v.algorithm = Algorithm::SelectLitePlus;
        specs.push_back(v);
    }
    const auto c = run_all(specs);

    std::vector<std::vector<double>> samples;
    for (const auto& spec : specs) {
        std::vector<double> xs;
        for (const auto& r : c.raw)
            if (r.algorithm == spec.algorithm_label() && r.T == T)
                xs.push_back(r.satisficing_regret);
        samples.push_back(std::move(xs));
    }
    const double q95 = quantile(samples[0], 0.95);
    double hi = 0.0;
    for (const auto& xs : samples)
        hi = std::max(hi, *std::max_element(xs.begin(), xs.end()));
    std::vector<double> grid;
    for (double x = 0.0; x <= hi + bin_width; x += bin_width)
        grid.push_back(x);
    grid.push_back(q95);
    std::sort(grid.begin(), grid.end());

    const fs::path dir = o.out;
    auto hist = open_output(dir / "histogram.csv");
    hist << "algorithm,bin_lo,bin_hi,count\n";
    auto exc = open_output(dir / "exceedance.csv");
    exc << "algorithm,x,p_exceed,wilson_lo,wilson_hi\n";
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto label = specs[i].algorithm_label();
        write_histogram_csv(hist, label, histogram(samples[i], bin_width));
        write_exceedance_csv(exc, label, tail_exceedance(samples[i], grid));
        const std::vector<double> at{q95};
        const auto p = tail_exceedance(samples[i], at)[0].prob;
        std::fprintf(stderr, "%-18s P(Regret_S > %.1f [SELECT q95]) = %.4f  [%.4f, %.4f]\n", label.c_str(), q95,
                     p.estimate, p.lo, p.hi);
    }
    write_outputs(dir, "tail", specs, c);
    return 0;
}

int cmd_ablation(const CommonOptions& o, CLI::App* cmd)
{
    CommonOptions base = o;
    if (cmd->count("--preset") == 0)
        base.preset = "lipschitz-ablation";
    const auto s = resolve(base, cmd);
    std::vector<ExperimentSpec> specs;
    for (auto ab : {Ablation::Full, Ablation::SkipStep1, Ablation::SkipStep2, Ablation::SkipStep3}) {
        auto v = s;
        v.ablation = ab;
        v.label = std::string(to_string(v.algorithm)) + "[" + to_string(ab) + "]";
        specs.push_back(v);
    }
    write_outputs(o.out, "ablation", specs, run_all(specs));
    return 0;
}

int cmd_robustness(const CommonOptions& o, CLI::App* cmd, const std::vector<double>& lambdas)
{
    CommonOptions base = o;
    if (cmd->count("--preset") == 0)
        base.preset = "lipschitz-realizable";
    const auto s = resolve(base, cmd);
    std::vector<ExperimentSpec> specs;
    for (double l : lambdas) {
        auto v = s;
        v.gamma_scale = l;
        v.label = std::string(to_string(v.algorithm)) + "[lambda=" + format_double(l) + "]";
        specs.push_back(v);
    }
    write_outputs(o.out, "robustness", specs, run_all(specs));
    return 0;
}

int cmd_calibrate(const std::string& csv, const std::string& out, double lo, double hi)
{
    const auto rows = read_price_volume_csv(csv);
    const auto fit = calibrate_pricing(rows, lo, hi);
    for (const auto& w : fit.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    json j = model_to_json(fit.model);
    j["fit"] = {{"g", fit.g}, {"h", fit.h}, {"sigma", fit.sigma}, {"rows", rows.size()}, {"normalized", fit.normalized}};
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(out, j);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Satisficing bandit experiments"};
    app.require_subcommand(1);

    CommonOptions run_o;
    CommonOptions sweep_o;
    CommonOptions tail_o;
    CommonOptions abl_o;
    CommonOptions rob_o;
    auto* run = app.add_subcommand("run", "One experiment at a single horizon (the last given)");
    add_common(run, run_o);
    auto* sweep = app.add_subcommand("sweep", "One experiment over a grid of horizons");
    add_common(sweep, sweep_o);
    auto* tail = app.add_subcommand("tail", "SELECT vs SELECT-LITE(+) regret distributions at one horizon");
    tail_o.preset = "tail";
    add_common(tail, tail_o);
    double bin_width = 10.0;
    tail->add_option("--bin-width", bin_width, "Histogram bin width")->capture_default_str();
    auto* abl = app.add_subcommand("ablation", "Full SELECT and its three single-step ablations");
    add_common(abl, abl_o);
    auto* rob = app.add_subcommand("robustness", "SELECT over a grid of gamma scales");
    add_common(rob, rob_o);
    std::vector<double> lambdas{0.5, 1.0, 2.0, 5.0};
    rob->add_option("--lambdas", lambdas, "Gamma scales")->capture_default_str();

    auto* cal = app.add_subcommand("calibrate", "Fit a linear-demand pricing instance from (price, volume) rows");
    std::string cal_csv;
    std::string cal_out;
    double cal_lo = 0.0;
    double cal_hi = 4.0;
    cal->add_option("csv", cal_csv, "CSV with price,volume columns")->required();
    cal->add_option("--out", cal_out, "Write the instance JSON here instead of stdout");
    cal->add_option("--price-lo", cal_lo, "Lower end of the price domain")->capture_default_str();
    cal->add_option("--price-hi", cal_hi, "Upper end of the price domain")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_experiment("run", run_o, run, true);
        if (*sweep)
            return cmd_experiment("sweep", sweep_o, sweep, false);
        if (*tail)
            return cmd_tail(tail_o, tail, bin_width);
        if (*abl)
            return cmd_ablation(abl_o, abl);
        if (*rob)
            return cmd_robustness(rob_o, rob, lambdas);
        if (*cal)
            return cmd_calibrate(cal_csv, cal_out, cal_lo, cal_hi);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const CalibrationError& e) {
        std::fprintf(stderr, "calibration error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
