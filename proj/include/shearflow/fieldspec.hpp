#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "shearflow/field.hpp"
#include "shearflow/simulate.hpp"

namespace shearflow {

inline constexpr const char* version_string = "shearflow 0.1.0";

namespace spec {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw std::invalid_argument("unknown key \"" + it.key() + "\" in " + where);
    }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::invalid_argument(where + " is missing key \"" + key + "\"");
    return *it;
}

/// Ladder schema:
///   {"rule":"self_similar","rho":100,"gamma":2.0,"P":4}
///   {"rule":"fast_separation","rho":2,"alpha":2.0,"gamma":2.0,"P":3}
///   {"rule":"explicit","r":[1,2,3],"gammas":[1.0,3.0,9.0]}
inline LadderRule parse_ladder(const json& j) {
    const std::string rule = require(j, "rule", "ladder").get<std::string>();
    if (rule == "self_similar") {
        reject_unknown_keys(j, {"rule", "rho", "gamma", "P"}, "ladder(self_similar)");
        return LadderRule::self_similar(require(j, "rho", "ladder").get<std::int64_t>(),
                                        require(j, "gamma", "ladder").get<double>(),
                                        require(j, "P", "ladder").get<int>());
    }
    if (rule == "fast_separation") {
        reject_unknown_keys(j, {"rule", "rho", "alpha", "gamma", "P"}, "ladder(fast_separation)");
        return LadderRule::fast_separation(require(j, "rho", "ladder").get<std::int64_t>(),
                                           require(j, "alpha", "ladder").get<double>(),
                                           require(j, "gamma", "ladder").get<double>(),
                                           require(j, "P", "ladder").get<int>());
    }
    if (rule == "explicit") {
        reject_unknown_keys(j, {"rule", "r", "gammas"}, "ladder(explicit)");
        return LadderRule::explicit_sequences(
            require(j, "r", "ladder").get<std::vector<std::int64_t>>(),
            require(j, "gammas", "ladder").get<std::vector<double>>());
    }
    throw std::invalid_argument("ladder.rule must be self_similar, fast_separation or explicit");
}

/// Profiles schema:
///   {"family":"sine"} | {"family":"cosine_valley"}
///   {"family":"custom","custom":[{"cos":[...],"sin":[...]}, ...]}   (one per scale)
/// sine/cosine_valley are variance-normalized; custom coefficients are used
/// as given (only the h(0)=0 constant shift is applied).
inline std::vector<FourierProfile> parse_profiles(const json& j, std::size_t n_scales) {
    const std::string family = require(j, "family", "profiles").get<std::string>();
    if (family == "sine") {
        reject_unknown_keys(j, {"family"}, "profiles");
        return std::vector<FourierProfile>(n_scales, sine_profile());
    }
    if (family == "cosine_valley") {
        reject_unknown_keys(j, {"family"}, "profiles");
        return std::vector<FourierProfile>(n_scales, cosine_valley_profile());
    }
    if (family == "custom") {
        reject_unknown_keys(j, {"family", "custom"}, "profiles");
        const json& arr = require(j, "custom", "profiles");
        if (!arr.is_array() || arr.size() != n_scales)
            throw std::invalid_argument("profiles.custom must list one profile per scale (" +
                                        std::to_string(n_scales) + ")");
        std::vector<FourierProfile> out;
        for (const json& pj : arr) {
            reject_unknown_keys(pj, {"cos", "sin"}, "profiles.custom[n]");
            std::vector<double> c, s;
            if (pj.contains("cos")) c = pj["cos"].get<std::vector<double>>();
            if (pj.contains("sin")) s = pj["sin"].get<std::vector<double>>();
            out.push_back(raw_profile(c, s));
        }
        return out;
    }
    throw std::invalid_argument("profiles.family must be sine, cosine_valley or custom");
}

inline MultiscaleField parse_field(const json& j) {
    reject_unknown_keys(j, {"ladder", "profiles"}, "field");
    ScaleLadder lad = build_ladder(parse_ladder(require(j, "ladder", "field")));
    auto profiles = parse_profiles(require(j, "profiles", "field"), lad.gammas.size());
    return make_field(std::move(lad), std::move(profiles));
}

/// Simulation schema:
///   {"checkpoints":[...],"base_dt":0.01,"n_paths":1000,"seed":1,
///    "scale_range":{"k":0,"p":2},"scheme":"exact_representation",
///    "substep_safety":0.01}                      (last two optional)
inline SimConfig parse_sim(const json& j) {
    reject_unknown_keys(j, {"checkpoints", "base_dt", "n_paths", "seed", "scale_range", "scheme",
                            "substep_safety"},
                        "sim");
    SimConfig cfg;
    cfg.checkpoints = require(j, "checkpoints", "sim").get<std::vector<double>>();
    cfg.base_dt = require(j, "base_dt", "sim").get<double>();
    cfg.n_paths = require(j, "n_paths", "sim").get<std::int64_t>();
    cfg.seed = require(j, "seed", "sim").get<std::uint64_t>();
    const json& sr = require(j, "scale_range", "sim");
    reject_unknown_keys(sr, {"k", "p"}, "sim.scale_range");
    cfg.scale_k = require(sr, "k", "sim.scale_range").get<int>();
    cfg.scale_p = require(sr, "p", "sim.scale_range").get<int>();
    if (j.contains("scheme")) {
        const std::string s = j["scheme"].get<std::string>();
        if (s == "exact_representation")
            cfg.scheme = Scheme::exact_representation;
        else if (s == "euler_maruyama_2d")
            cfg.scheme = Scheme::euler_maruyama_2d;
        else
            throw std::invalid_argument("sim.scheme must be exact_representation or euler_maruyama_2d");
    }
    if (j.contains("substep_safety")) cfg.substep_safety = j["substep_safety"].get<double>();
    return cfg;
}

/// Experiment analysis schema (all optional):
///   {"regime":"auto|h1|h2|self_similar|fast_separation|zero",
///    "fit_window":4, "exponent_tolerance":0.15}
struct AnalysisConfig {
    std::string regime = "auto";
    int fit_window = 4;
    double exponent_tolerance = 0.15;
};

inline AnalysisConfig parse_analysis(const json& j) {
    reject_unknown_keys(j, {"regime", "fit_window", "exponent_tolerance"}, "analysis");
    AnalysisConfig a;
    if (j.contains("regime")) a.regime = j["regime"].get<std::string>();
    if (j.contains("fit_window")) a.fit_window = j["fit_window"].get<int>();
    if (j.contains("exponent_tolerance")) a.exponent_tolerance = j["exponent_tolerance"].get<double>();
    return a;
}

struct ExperimentConfig {
    json field_json;  // kept for the manifest
    std::optional<MultiscaleField> field;
    SimConfig sim;
    AnalysisConfig analysis;
};

inline ExperimentConfig parse_experiment(const json& j) {
    reject_unknown_keys(j, {"field", "sim", "analysis"}, "config");
    ExperimentConfig cfg;
    if (j.contains("field")) {
        cfg.field_json = j["field"];
        cfg.field = parse_field(j["field"]);
    }
    cfg.sim = parse_sim(require(j, "sim", "config"));
    if (j.contains("analysis")) cfg.analysis = parse_analysis(j["analysis"]);
    if (!cfg.field && !cfg.sim.zero_field())
        throw std::invalid_argument("config: non-empty scale_range requires a field");
    return cfg;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

/// Standalone profile file for the mixing CLI: {"cos":[...],"sin":[...]}.
/// Must be mean-zero (the constant is forced to zero, not shifted).
inline FourierProfile parse_mean_zero_profile(const json& j) {
    reject_unknown_keys(j, {"cos", "sin"}, "profile");
    std::vector<double> c, s;
    if (j.contains("cos")) c = j["cos"].get<std::vector<double>>();
    if (j.contains("sin")) s = j["sin"].get<std::vector<double>>();
    FourierProfile p;
    p.cos_coeffs = std::move(c);
    p.sin_coeffs = std::move(s);
    p.constant = 0.0;
    return p;
}

}  // namespace spec
}  // namespace shearflow
