#pragma once
// Run configuration: a JSON document whose omitted fields fall back to the
// IMpassion031 case study. See README.md for the schema.

#include "aed/design.hpp"
#include "aed/error.hpp"
#include "aed/report.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aed {

struct LabeledScenario {
    std::string label;
    ScenarioSpec spec;
};

struct ThresholdSet {
    std::string label;
    double d_S = 0.12;
    double d_C = 0.10;
};

struct RunConfig {
    DesignSpec design = impassion031_design();
    std::vector<LabeledScenario> scenarios;
    std::vector<ThresholdSet> threshold_sets;
    std::optional<double> mdd_control_rate;
    std::int64_t n_reps = 100000;
    std::uint64_t seed = 20200131;
    Format output_format = Format::Text;
    std::optional<std::string> output_path;

    // Observed control rate assumed by the MDD grid: the first scenario's
    // control rate thinned by dropout unless set explicitly.
    double control_rate() const {
        if (mdd_control_rate) return *mdd_control_rate;
        return (1.0 - design.dropout) * scenarios.front().spec.pi2;
    }
};

// Scenarios 1-3: S effect 0.20, C effect 0.20 / 0.12 / 0.04, control 0.48.
inline std::vector<LabeledScenario> impassion031_scenarios() {
    return {{"1", {0.48, 0.20, 0.20}}, {"2", {0.48, 0.20, 0.12}}, {"3", {0.48, 0.20, 0.04}}};
}

namespace detail {

using json = nlohmann::json;

inline std::string line_col(std::string_view src, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < src.size(); ++i) {
        if (src[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    const std::set<std::string_view> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
}

inline std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

inline double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
    return v.get<double>();
}

inline std::int64_t get_integer(const json& obj, const std::string& path, const char* key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
    return v.get<std::int64_t>();
}

inline std::string get_string(const json& obj, const std::string& path, const char* key, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

inline void in_range(bool ok, const std::string& field, const char* msg) {
    if (!ok) throw ConfigError(field, msg);
}

inline DesignSpec parse_design(const json& j) {
    const std::string p = "design";
    check_keys(j, p, {"n1", "n2", "alloc_ratio", "alpha", "spend_fraction", "alpha1", "w1", "w2", "prevalence",
                      "dropout", "d_s", "d_c"});
    DesignSpec d;
    d.n1 = get_integer(j, p, "n1", d.n1);
    d.n2 = get_integer(j, p, "n2", d.n2);
    in_range(d.n1 >= 2, "design.n1", "must be at least 2");
    in_range(d.n2 >= 2, "design.n2", "must be at least 2");
    d.alloc_ratio = get_number(j, p, "alloc_ratio", d.alloc_ratio);
    d.alpha_total = get_number(j, p, "alpha", d.alpha_total);
    in_range(d.alpha_total > 0.0 && d.alpha_total < 0.5, "design.alpha", "must lie in (0, 0.5)");
    if (j.contains("alpha1") && j.contains("spend_fraction"))
        throw ConfigError("design.alpha1", "give either alpha1 or spend_fraction, not both");
    const double spend = get_number(j, p, "spend_fraction", 0.5);
    in_range(spend > 0.0 && spend < 1.0, "design.spend_fraction", "must lie in (0, 1)");
    d.alpha1 = get_number(j, p, "alpha1", spend * d.alpha_total);
    if (j.contains("w1") != j.contains("w2")) throw ConfigError("design.w1", "give both w1 and w2 or neither");
    if (j.contains("w1")) {
        d.w1 = get_number(j, p, "w1", d.w1);
        d.w2 = get_number(j, p, "w2", d.w2);
    } else {
        d.set_sample_size_weights();
    }
    d.prevalence = get_number(j, p, "prevalence", d.prevalence);
    d.dropout = get_number(j, p, "dropout", d.dropout);
    d.d_S = get_number(j, p, "d_s", d.d_S);
    d.d_C = get_number(j, p, "d_c", d.d_C);
    try {
        validate(d);
    } catch (const ConfigError& e) {
        throw ConfigError("design." + e.field(), e.message());
    }
    return d;
}

inline std::vector<LabeledScenario> parse_scenarios(const json& j) {
    if (!j.is_array()) throw ConfigError("scenarios", "expected an array");
    if (j.empty()) throw ConfigError("scenarios", "at least one scenario is required");
    std::vector<LabeledScenario> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = "scenarios[" + std::to_string(i) + "]";
        const auto& s = j[i];
        check_keys(s, p, {"label", "pi2", "effect_s", "effect_c"});
        LabeledScenario ls;
        ls.label = get_string(s, p, "label", std::to_string(i + 1));
        ls.spec.pi2 = get_number(s, p, "pi2", 0.48);
        ls.spec.effect_S = get_number(s, p, "effect_s", 0.20);
        ls.spec.effect_C = get_number(s, p, "effect_c", 0.20);
        try {
            validate(ls.spec);
        } catch (const ConfigError& e) {
            throw ConfigError(p + "." + e.field(), e.message());
        }
        out.push_back(std::move(ls));
    }
    return out;
}

inline std::vector<ThresholdSet> parse_thresholds(const json& j) {
    if (!j.is_array()) throw ConfigError("threshold_sets", "expected an array");
    if (j.empty()) throw ConfigError("threshold_sets", "at least one threshold set is required");
    std::vector<ThresholdSet> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = "threshold_sets[" + std::to_string(i) + "]";
        const auto& t = j[i];
        check_keys(t, p, {"label", "d_s", "d_c"});
        ThresholdSet ts;
        ts.label = get_string(t, p, "label", "set" + std::to_string(i + 1));
        ts.d_S = get_number(t, p, "d_s", ts.d_S);
        ts.d_C = get_number(t, p, "d_c", ts.d_C);
        in_range(ts.d_S > -1.0 && ts.d_S < 1.0, p + ".d_s", "must lie in (-1, 1)");
        in_range(ts.d_C > -1.0 && ts.d_C < 1.0, p + ".d_c", "must lie in (-1, 1)");
        out.push_back(std::move(ts));
    }
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::string_view source) {
    using detail::json;
    json root = json::object();
    bool blank = true;
    for (char c : source)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) {
        try {
            root = json::parse(source);
        } catch (const json::parse_error& e) {
            throw ConfigError("", "malformed document at " + detail::line_col(source, e.byte) + ": " + e.what());
        }
    }
    detail::check_keys(root, "", {"design", "scenarios", "threshold_sets", "mdd_control_rate", "n_reps", "seed",
                                  "output_format", "output_path"});

    RunConfig cfg;
    if (root.contains("design")) cfg.design = detail::parse_design(root.at("design"));
    cfg.scenarios = root.contains("scenarios") ? detail::parse_scenarios(root.at("scenarios"))
                                               : impassion031_scenarios();
    cfg.threshold_sets = root.contains("threshold_sets")
                             ? detail::parse_thresholds(root.at("threshold_sets"))
                             : std::vector<ThresholdSet>{{"primary", cfg.design.d_S, cfg.design.d_C},
                                                         {"aggressive", 0.15, 0.12}};
    if (root.contains("mdd_control_rate")) {
        const double cr = detail::get_number(root, "", "mdd_control_rate", 0.0);
        detail::in_range(cr > 0.0 && cr < 1.0, "mdd_control_rate", "must lie in (0, 1)");
        cfg.mdd_control_rate = cr;
    }
    cfg.n_reps = detail::get_integer(root, "", "n_reps", cfg.n_reps);
    detail::in_range(cfg.n_reps >= 1, "n_reps", "must be at least 1");
    if (root.contains("seed")) {
        const auto& s = root.at("seed");
        if (!s.is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("output_format")) {
        const auto f = parse_format(detail::get_string(root, "", "output_format", "text"));
        if (!f) throw ConfigError("output_format", "expected one of text, csv, json");
        cfg.output_format = *f;
    }
    if (root.contains("output_path")) {
        if (root.at("output_path").is_null()) cfg.output_path.reset();
        else cfg.output_path = detail::get_string(root, "", "output_path", "");
    }
    return cfg;
}

} // namespace aed
