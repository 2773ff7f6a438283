#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "satisficing/harness.hpp"

#ifndef SATISFICING_GIT_DESCRIBE
#define SATISFICING_GIT_DESCRIBE "unknown"
#endif

namespace satisficing {

using json = nlohmann::json;

// Instance files:
//   {"kind": "finite", "means": [...], "noise_std": 1}
//   {"kind": "concave1d", "peak": 1, "curvature": 16, "vertex": 0.25, "domain": [0, 1]}
//   {"kind": "lipschitz", "center": [...], "height": 3, "width": 100, "cap": 1, "lipschitz": 36.39}
//   {"kind": "linear_pricing", "g": 7.98, "h": 1.87, "domain": [0, 4]}
// "noise_std" defaults to 1 and "name" to the kind.

inline json model_to_json(const RewardModel& m)
{
    json j;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, FiniteArms>) {
                j = {{"kind", "finite"}, {"means", p.means}};
            } else if constexpr (std::is_same_v<P, ConcaveQuadratic>) {
                j = {{"kind", "concave1d"},
                     {"peak", p.peak},
                     {"curvature", p.curvature},
                     {"vertex", p.vertex},
                     {"domain", {p.lo, p.hi}}};
            } else if constexpr (std::is_same_v<P, GaussianBump>) {
                j = {{"kind", "lipschitz"}, {"center", p.center}, {"height", p.height},
                     {"width", p.width},    {"cap", p.cap},       {"lipschitz", p.lipschitz}};
            } else {
                j = {{"kind", "linear_pricing"}, {"g", p.g}, {"h", p.h}, {"domain", {p.lo, p.hi}}};
            }
        },
        m.params);
    j["noise_std"] = m.noise_std;
    j["name"] = m.name;
    return j;
}

inline RewardModel model_from_json(const json& j)
{
    try {
        const std::string kind = j.at("kind").get<std::string>();
        RewardModel m;
        m.noise_std = j.value("noise_std", 1.0);
        m.name = j.value("name", kind);
        auto domain = [&](double lo, double hi) {
            if (!j.contains("domain"))
                return std::pair{lo, hi};
            const auto& d = j.at("domain");
            if (!d.is_array() || d.size() != 2)
                throw ConfigError("\"domain\" must be a two-element array");
            return std::pair{d[0].get<double>(), d[1].get<double>()};
        };
        if (kind == "finite") {
            m.params = FiniteArms{j.at("means").get<std::vector<double>>()};
        } else if (kind == "concave1d") {
            const auto [lo, hi] = domain(0.0, 1.0);
            m.params = ConcaveQuadratic{j.at("peak").get<double>(), j.at("curvature").get<double>(),
                                        j.at("vertex").get<double>(), lo, hi};
        } else if (kind == "lipschitz") {
            m.params = GaussianBump{j.at("center").get<std::vector<double>>(), j.at("height").get<double>(),
                                    j.at("width").get<double>(), j.value("cap", 1.0), j.at("lipschitz").get<double>()};
        } else if (kind == "linear_pricing") {
            const auto [lo, hi] = domain(0.0, 4.0);
            m.params = LinearPricing{j.at("g").get<double>(), j.at("h").get<double>(), lo, hi};
        } else {
            throw ConfigError("unknown instance kind: " + kind);
        }
        validate(m);
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed instance: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid instance: ") + e.what());
    }
}

inline json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline RewardModel load_instance(const std::filesystem::path& path)
{
    try {
        return model_from_json(read_json_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline json spec_to_json(const ExperimentSpec& s)
{
    return {{"preset", s.preset},
            {"label", s.algorithm_label()},
            {"algorithm", to_string(s.algorithm)},
            {"oracle", to_string(s.oracle)},
            {"S", s.S},
            {"horizons", s.horizons},
            {"replications", s.replications},
            {"base_seed", s.base_seed},
            {"zeta", s.zeta},
            {"gamma_scale", s.gamma_scale},
            {"radius_scale", s.radius_scale},
            {"ablation", to_string(s.ablation)},
            {"oracle_config",
             {{"thompson_prior_var", s.oracle_config.thompson_prior_var},
              {"pricing_grid_points", s.oracle_config.pricing_grid_points},
              {"ridge", s.oracle_config.ridge},
              {"linucb_width_offset", s.oracle_config.linucb_width_offset},
              {"linucb_C1", s.oracle_config.linucb_C1}}},
            {"model", model_to_json(s.model)}};
}

/// Applies the fields present in `j` on top of `s`. A "preset" field resets
/// the instance, S, oracle and horizons to that preset first.
inline void apply_spec_json(ExperimentSpec& s, const json& j)
{
    try {
        if (j.contains("preset")) {
            const Preset p = find_preset(j.at("preset").get<std::string>());
            const Algorithm a = s.algorithm;
            s = spec_from_preset(p, a);
        }
        if (j.contains("algorithm"))
            s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        if (j.contains("label"))
            s.label = j.at("label").get<std::string>();
        if (j.contains("model"))
            s.model = model_from_json(j.at("model"));
        if (j.contains("oracle"))
            s.oracle = parse_oracle_kind(j.at("oracle").get<std::string>());
        if (j.contains("S"))
            s.S = j.at("S").get<double>();
        if (j.contains("horizons"))
            s.horizons = j.at("horizons").get<std::vector<std::int64_t>>();
        if (j.contains("replications"))
            s.replications = j.at("replications").get<int>();
        if (j.contains("base_seed"))
            s.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("zeta"))
            s.zeta = j.at("zeta").get<double>();
        if (j.contains("gamma_scale"))
            s.gamma_scale = j.at("gamma_scale").get<double>();
        if (j.contains("radius_scale"))
            s.radius_scale = j.at("radius_scale").get<double>();
        if (j.contains("ablation"))
            s.ablation = parse_ablation(j.at("ablation").get<std::string>());
        if (j.contains("threads"))
            s.threads = j.at("threads").get<unsigned>();
        if (j.contains("oracle_config")) {
            const auto& o = j.at("oracle_config");
            auto& c = s.oracle_config;
            c.thompson_prior_var = o.value("thompson_prior_var", c.thompson_prior_var);
            c.pricing_grid_points = o.value("pricing_grid_points", c.pricing_grid_points);
            c.ridge = o.value("ridge", c.ridge);
            c.linucb_width_offset = o.value("linucb_width_offset", c.linucb_width_offset);
            c.linucb_C1 = o.value("linucb_C1", c.linucb_C1);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed spec: ") + e.what());
    }
}

inline json manifest(const std::string& command, const std::vector<ExperimentSpec>& specs)
{
    json runs = json::array();
    for (const auto& s : specs)
        runs.push_back(spec_to_json(s));
    return {{"command", command},
            {"git_describe", SATISFICING_GIT_DESCRIBE},
            {"csv_schema", {{"raw", kRawSchema}, {"aggregate", kAggregateSchema}}},
            {"seed_mixing", "splitmix64(splitmix64(base_seed) ^ rep)"},
            {"runs", runs}};
}

inline void write_json_file(const std::filesystem::path& path, const json& j)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

} // namespace satisficing
