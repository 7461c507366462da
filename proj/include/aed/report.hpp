#pragma once
// Text / CSV / JSON rendering of boundaries, MDD grids and operating
// characteristics.
//
// CSV and JSON carry one record per row with stable column names (listed
// in the *_columns() functions); probabilities are written at full
// precision. Text output is fixed-width and presentation-only.

#include "aed/adaptive_test.hpp"
#include "aed/boundaries.hpp"
#include "aed/design.hpp"
#include "aed/error.hpp"
#include "aed/mdd.hpp"
#include "aed/simulation.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aed {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct OcEntry {
    std::string scenario_label;
    std::string threshold_label;
    ScenarioSpec scenario;
    double d_S = 0.0;
    double d_C = 0.0;
    OperatingCharacteristics oc;
};

struct FixedPowerEntry {
    std::string scenario_label;
    std::int64_t n_total = 0;
    double pi2 = 0.0;
    double effect = 0.0;
    double dropout = 0.0;
    double alpha = 0.0;
    Estimate power;
};

struct ReportMetadata {
    std::uint64_t seed = 0;
    std::int64_t n_reps = 0;
    std::string design_fingerprint;
    std::string tool_version{kToolVersion};
    std::optional<std::string> generated_at;  // only with an explicit stamp request
};

struct ReportBundle {
    std::optional<BoundaryPair> boundaries;
    std::vector<MddEntry> mdd_table;
    std::vector<OcEntry> oc_tables;
    std::vector<FixedPowerEntry> fixed_power;
    ReportMetadata metadata;
};

enum class TableKind { Decisions, Power, ConditionalPower, Mdd, Boundaries, FixedPower };
enum class Format { Text, Csv, Json };

inline std::string_view table_key(TableKind k) noexcept {
    switch (k) {
    case TableKind::Decisions: return "decisions";
    case TableKind::Power: return "power";
    case TableKind::ConditionalPower: return "conditional_power";
    case TableKind::Mdd: return "mdd";
    case TableKind::Boundaries: return "boundaries";
    case TableKind::FixedPower: return "fixed_power";
    }
    return "";
}

inline std::optional<TableKind> parse_table_key(std::string_view key) noexcept {
    for (auto k : {TableKind::Decisions, TableKind::Power, TableKind::ConditionalPower, TableKind::Mdd,
                   TableKind::Boundaries, TableKind::FixedPower})
        if (table_key(k) == key) return k;
    return std::nullopt;
}

inline std::optional<Format> parse_format(std::string_view s) noexcept {
    if (s == "text") return Format::Text;
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    return std::nullopt;
}

// FNV-1a over a canonical text form of the design.
inline std::string design_fingerprint(const DesignSpec& d) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "n1=%lld;n2=%lld;alloc=%.17g;alpha=%.17g;alpha1=%.17g;w1=%.17g;w2=%.17g;"
                  "prev=%.17g;dropout=%.17g;d_s=%.17g;d_c=%.17g",
                  static_cast<long long>(d.n1), static_cast<long long>(d.n2), d.alloc_ratio, d.alpha_total,
                  d.alpha1, d.w1, d.w2, d.prevalence, d.dropout, d.d_S, d.d_C);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001b3ull;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

namespace detail {

using Cell = std::variant<std::string, double, std::int64_t, bool>;
using Record = std::vector<Cell>;

struct Table {
    std::vector<std::string> columns;
    std::vector<Record> rows;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fixed(double v, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return csv_escape(v);
            else if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return std::to_string(v);
        },
        c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

inline void require_oc(const ReportBundle& b, TableKind k) {
    if (b.oc_tables.empty()) throw MissingTableError(std::string(table_key(k)));
}

inline const std::vector<std::string> kOcPrefix{"scenario", "threshold_set", "d_s", "d_c"};

inline Record oc_prefix(const OcEntry& e) {
    return {e.scenario_label, e.threshold_label, e.d_S, e.d_C};
}

inline std::vector<std::string> with_prefix(std::initializer_list<std::string> rest) {
    std::vector<std::string> cols = kOcPrefix;
    cols.insert(cols.end(), rest);
    return cols;
}

struct PowerMeasure {
    const char* key;
    const char* label;
    Estimate OperatingCharacteristics::*field;
};

inline constexpr PowerMeasure kPowerMeasures[] = {
    {"power_f", "Power F", &OperatingCharacteristics::power_F},
    {"power_s", "Power S", &OperatingCharacteristics::power_S},
    {"power_f_or_s", "Power (F or S)", &OperatingCharacteristics::power_F_or_S},
    {"power_f_and_s", "Power (F and S)", &OperatingCharacteristics::power_F_and_S},
};

inline constexpr PowerMeasure kConditionalMeasures[] = {
    {"cp_f_only", "CP F if only F tested in stage 2", &OperatingCharacteristics::cond_power_F_only},
    {"cp_s_only", "CP S if only S tested in stage 2", &OperatingCharacteristics::cond_power_S_only},
    {"cp_both", "CP (F or S) if F and S tested in stage 2", &OperatingCharacteristics::cond_power_both},
};

inline Table build_table(const ReportBundle& b, TableKind kind) {
    Table t;
    switch (kind) {
    case TableKind::Decisions:
        require_oc(b, kind);
        t.columns = with_prefix({"decision", "label", "frequency", "mc_se", "count", "n_reps"});
        for (const auto& e : b.oc_tables)
            for (const auto d : kAllDecisions) {
                const Estimate& est = e.oc.decision(d);
                Record r = oc_prefix(e);
                r.insert(r.end(), {std::string(decision_key(d)), std::string(decision_label(d)), est.value,
                                   est.mc_se, est.events, est.trials});
                t.rows.push_back(std::move(r));
            }
        break;
    case TableKind::Power:
        require_oc(b, kind);
        t.columns = with_prefix({"measure", "value", "mc_se", "count", "n_reps"});
        for (const auto& e : b.oc_tables)
            for (const auto& m : kPowerMeasures) {
                const Estimate& est = e.oc.*m.field;
                Record r = oc_prefix(e);
                r.insert(r.end(), {std::string(m.key), est.value, est.mc_se, est.events, est.trials});
                t.rows.push_back(std::move(r));
            }
        break;
    case TableKind::ConditionalPower:
        require_oc(b, kind);
        t.columns = with_prefix({"measure", "value", "mc_se", "count", "denominator", "defined"});
        for (const auto& e : b.oc_tables)
            for (const auto& m : kConditionalMeasures) {
                const Estimate& est = e.oc.*m.field;
                Record r = oc_prefix(e);
                r.insert(r.end(), {std::string(m.key), est.value, est.mc_se, est.events, est.trials, est.defined});
                t.rows.push_back(std::move(r));
            }
        break;
    case TableKind::Mdd:
        if (b.mdd_table.empty()) throw MissingTableError("mdd");
        t.columns = {"stage", "population", "continuation", "conservative", "control_rate", "level", "delta",
                     "assumptions"};
        for (const auto& e : b.mdd_table)
            t.rows.push_back({static_cast<std::int64_t>(e.request.stage), std::string(to_string(e.request.population)),
                              std::string(to_string(e.request.continuation)), e.request.conservative,
                              e.request.control_rate, e.result.level, e.result.delta, e.result.assumptions});
        break;
    case TableKind::Boundaries:
        if (!b.boundaries) throw MissingTableError("boundaries");
        t.columns = {"alpha_total", "alpha1", "alpha2", "z1", "z2", "t1"};
        t.rows.push_back({b.boundaries->alpha_total, b.boundaries->alpha1, b.boundaries->alpha2,
                          b.boundaries->z1, b.boundaries->z2, b.boundaries->t1});
        break;
    case TableKind::FixedPower:
        if (b.fixed_power.empty()) throw MissingTableError("fixed_power");
        t.columns = {"scenario", "n_total", "pi2", "effect", "dropout", "alpha", "power", "mc_se", "count", "n_reps"};
        for (const auto& e : b.fixed_power)
            t.rows.push_back({e.scenario_label, e.n_total, e.pi2, e.effect, e.dropout, e.alpha, e.power.value,
                              e.power.mc_se, e.power.events, e.power.trials});
        break;
    }
    return t;
}

inline nlohmann::ordered_json metadata_json(const ReportMetadata& m) {
    nlohmann::ordered_json j;
    j["seed"] = m.seed;
    j["n_reps"] = m.n_reps;
    j["design_fingerprint"] = m.design_fingerprint;
    j["tool_version"] = m.tool_version;
    if (m.generated_at) j["generated_at"] = *m.generated_at;
    return j;
}

inline nlohmann::ordered_json rows_json(const Table& t) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = cell_json(r[i]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

inline std::string render_csv(const Table& t, const ReportMetadata& m) {
    std::vector<std::string> cols = t.columns;
    cols.insert(cols.end(), {"seed", "design_fingerprint", "tool_version"});
    if (m.generated_at) cols.push_back("generated_at");
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i]);
        out += ',' + std::to_string(m.seed) + ',' + m.design_fingerprint + ',' + csv_escape(m.tool_version);
        if (m.generated_at) out += ',' + csv_escape(*m.generated_at);
        out += '\n';
    }
    return out;
}

// Fixed-width grid: first column left-aligned, the rest right-aligned.
inline std::string grid(const std::vector<std::vector<std::string>>& rows, std::size_t header_rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (width.size() <= i) width.push_back(0);
            width[i] = std::max(width[i], r[i].size());
        }
    std::string out;
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const auto& r = rows[ri];
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string pad(width[i] - r[i].size(), ' ');
            line += i == 0 ? r[i] + pad : "  " + pad + r[i];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
        if (ri + 1 == header_rows) out += std::string(total > 2 ? total - 2 : 0, '-') + '\n';
    }
    return out;
}

inline std::vector<std::vector<std::string>> oc_header(const ReportBundle& b, const char* corner) {
    std::vector<std::string> thresholds{""}, scenarios{corner};
    for (const auto& e : b.oc_tables) {
        thresholds.push_back("d_S=" + fixed(e.d_S, 2) + ",d_C=" + fixed(e.d_C, 2));
        scenarios.push_back("Scen. " + e.scenario_label);
    }
    return {thresholds, scenarios};
}

inline std::string render_text(const ReportBundle& b, TableKind kind) {
    std::string title;
    std::vector<std::vector<std::string>> rows;
    std::size_t header_rows = 1;
    switch (kind) {
    case TableKind::Decisions:
        require_oc(b, kind);
        title = "Relative frequencies of decisions at stage 1";
        rows = oc_header(b, "Decision");
        header_rows = 2;
        for (const auto d : kAllDecisions) {
            std::vector<std::string> r{std::string(decision_label(d))};
            for (const auto& e : b.oc_tables) r.push_back(fixed(e.oc.decision(d).value, 2));
            rows.push_back(std::move(r));
        }
        break;
    case TableKind::Power:
    case TableKind::ConditionalPower: {
        require_oc(b, kind);
        const bool cp = kind == TableKind::ConditionalPower;
        title = cp ? "Conditional power given activation of stage 2" : "Overall power";
        rows = oc_header(b, "");
        header_rows = 2;
        const std::span<const PowerMeasure> measures =
            cp ? std::span<const PowerMeasure>(kConditionalMeasures) : std::span<const PowerMeasure>(kPowerMeasures);
        for (const auto& m : measures) {
            std::vector<std::string> r{m.label};
            for (const auto& e : b.oc_tables) {
                const Estimate& est = e.oc.*m.field;
                r.push_back(est.defined ? fixed(est.value, 2) : "n/a");
            }
            rows.push_back(std::move(r));
        }
        break;
    }
    case TableKind::Mdd: {
        if (b.mdd_table.empty()) throw MissingTableError("mdd");
        title = "Minimal detectable differences";
        auto find = [&](Population p, int stage, Continuation c, bool conservative) -> const MddEntry* {
            for (const auto& e : b.mdd_table)
                if (e.request.population == p && e.request.stage == stage && e.request.continuation == c &&
                    e.request.conservative == conservative)
                    return &e;
            return nullptr;
        };
        auto cell = [&](Population p, int stage, Continuation c, bool paired) {
            const MddEntry* cons = find(p, stage, c, true);
            if (!cons) return std::string();
            std::string s = fixed(cons->result.delta, 2);
            if (paired)
                if (const MddEntry* lib = find(p, stage, c, false)) s += " [" + fixed(lib->result.delta, 2) + "]";
            return s;
        };
        rows.push_back({"Stage", "Subgroup S", "Full population F"});
        rows.push_back({"Stage 1", cell(Population::S, 1, Continuation::NotApplicable, true),
                        cell(Population::F, 1, Continuation::NotApplicable, true)});
        rows.push_back({"Stage 2", "", ""});
        rows.push_back({"- only S tested in stage 2", cell(Population::S, 2, Continuation::SOnly, false), ""});
        rows.push_back({"- only F tested in stage 2", "", cell(Population::F, 2, Continuation::FOnly, false)});
        rows.push_back({"- F and S included in stage 2", cell(Population::S, 2, Continuation::Both, true),
                        cell(Population::F, 2, Continuation::Both, true)});
        std::string out = title + "\n\n" + grid(rows, 1);
        out += "Control rate " + fixed(b.mdd_table.front().request.control_rate, 3) +
               ". Bracketed values apply when the other population drives the intersection test.\n";
        return out;
    }
    case TableKind::Boundaries: {
        if (!b.boundaries) throw MissingTableError("boundaries");
        title = "Group-sequential local significance levels";
        const auto& bp = *b.boundaries;
        rows = {{"Quantity", "Value"},
                {"alpha (overall, one-sided)", fixed(bp.alpha_total, 4)},
                {"alpha1 (stage 1)", fixed(bp.alpha1, 4)},
                {"alpha2 (stage 2)", fixed(bp.alpha2, 4)},
                {"z1", fixed(bp.z1, 4)},
                {"z2", fixed(bp.z2, 4)},
                {"information fraction t1", fixed(bp.t1, 4)}};
        break;
    }
    case TableKind::FixedPower:
        if (b.fixed_power.empty()) throw MissingTableError("fixed_power");
        title = "Power of the single-stage all-comers design";
        rows.push_back({"Scenario", "n", "pi2", "effect", "dropout", "alpha", "Power"});
        for (const auto& e : b.fixed_power)
            rows.push_back({"Scen. " + e.scenario_label, std::to_string(e.n_total), fixed(e.pi2, 2), fixed(e.effect, 2),
                            fixed(e.dropout, 2), fixed(e.alpha, 4), fixed(e.power.value, 2)});
        break;
    }
    return title + "\n\n" + grid(rows, header_rows);
}

} // namespace detail

// Column names of the CSV / JSON records for each table, excluding the
// trailing CSV metadata columns (seed, design_fingerprint, tool_version).
inline std::vector<std::string> table_columns(TableKind kind) {
    ReportBundle probe;
    probe.boundaries = BoundaryPair{};
    probe.mdd_table.push_back({});
    probe.oc_tables.push_back({});
    probe.fixed_power.push_back({});
    return detail::build_table(probe, kind).columns;
}

inline std::string render_table(const ReportBundle& bundle, TableKind kind, Format format) {
    switch (format) {
    case Format::Text: return detail::render_text(bundle, kind);
    case Format::Csv: return detail::render_csv(detail::build_table(bundle, kind), bundle.metadata);
    case Format::Json: {
        nlohmann::ordered_json j;
        j["table"] = std::string(table_key(kind));
        j["metadata"] = detail::metadata_json(bundle.metadata);
        j["rows"] = detail::rows_json(detail::build_table(bundle, kind));
        return j.dump(2) + '\n';
    }
    }
    return {};
}

// Several tables in one document: text and CSV blocks separated by a blank
// line; JSON as {"metadata": ..., "tables": {key: rows, ...}}.
inline std::string render_tables(const ReportBundle& bundle, std::span<const TableKind> kinds, Format format) {
    if (kinds.size() == 1) return render_table(bundle, kinds.front(), format);
    if (format == Format::Json) {
        nlohmann::ordered_json j;
        j["metadata"] = detail::metadata_json(bundle.metadata);
        j["tables"] = nlohmann::ordered_json::object();
        for (const auto k : kinds) j["tables"][std::string(table_key(k))] = detail::rows_json(detail::build_table(bundle, k));
        return j.dump(2) + '\n';
    }
    std::string out;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (i) out += '\n';
        out += render_table(bundle, kinds[i], format);
    }
    return out;
}

namespace detail {

inline OcEntry& oc_slot(ReportBundle& b, const nlohmann::json& row) {
    const auto scen = row.at("scenario").get<std::string>();
    const auto thr = row.at("threshold_set").get<std::string>();
    for (auto& e : b.oc_tables)
        if (e.scenario_label == scen && e.threshold_label == thr) return e;
    OcEntry e;
    e.scenario_label = scen;
    e.threshold_label = thr;
    e.d_S = row.at("d_s").get<double>();
    e.d_C = row.at("d_c").get<double>();
    b.oc_tables.push_back(std::move(e));
    return b.oc_tables.back();
}

inline Estimate estimate_from(const nlohmann::json& row, const char* value_key, const char* trials_key) {
    Estimate e;
    e.value = row.at(value_key).get<double>();
    e.mc_se = row.at("mc_se").get<double>();
    e.events = row.at("count").get<std::int64_t>();
    e.trials = row.at(trials_key).get<std::int64_t>();
    e.defined = row.contains("defined") ? row.at("defined").get<bool>() : true;
    return e;
}

inline void absorb_rows(ReportBundle& b, TableKind kind, const nlohmann::json& rows) {
    for (const auto& row : rows) {
        switch (kind) {
        case TableKind::Decisions: {
            OcEntry& e = oc_slot(b, row);
            const auto key = row.at("decision").get<std::string>();
            for (const auto d : kAllDecisions)
                if (decision_key(d) == key) e.oc.decisions[static_cast<std::size_t>(d)] =
                    estimate_from(row, "frequency", "n_reps");
            e.oc.n_reps = row.at("n_reps").get<std::int64_t>();
            break;
        }
        case TableKind::Power:
        case TableKind::ConditionalPower: {
            OcEntry& e = oc_slot(b, row);
            const auto key = row.at("measure").get<std::string>();
            const bool cp = kind == TableKind::ConditionalPower;
            const std::span<const PowerMeasure> measures =
                cp ? std::span<const PowerMeasure>(kConditionalMeasures) : std::span<const PowerMeasure>(kPowerMeasures);
            for (const auto& m : measures)
                if (key == m.key) e.oc.*m.field = estimate_from(row, "value", cp ? "denominator" : "n_reps");
            if (!cp) e.oc.n_reps = row.at("n_reps").get<std::int64_t>();
            break;
        }
        case TableKind::Mdd: {
            MddEntry e;
            e.request.stage = static_cast<int>(row.at("stage").get<std::int64_t>());
            e.request.population = row.at("population").get<std::string>() == "S" ? Population::S : Population::F;
            const auto c = row.at("continuation").get<std::string>();
            for (auto v : {Continuation::NotApplicable, Continuation::SOnly, Continuation::FOnly, Continuation::Both})
                if (c == to_string(v)) e.request.continuation = v;
            e.request.conservative = row.at("conservative").get<bool>();
            e.request.control_rate = row.at("control_rate").get<double>();
            e.result.level = row.at("level").get<double>();
            e.result.delta = row.at("delta").get<double>();
            e.result.assumptions = row.at("assumptions").get<std::string>();
            b.mdd_table.push_back(std::move(e));
            break;
        }
        case TableKind::Boundaries: {
            BoundaryPair bp;
            bp.alpha_total = row.at("alpha_total").get<double>();
            bp.alpha1 = row.at("alpha1").get<double>();
            bp.alpha2 = row.at("alpha2").get<double>();
            bp.z1 = row.at("z1").get<double>();
            bp.z2 = row.at("z2").get<double>();
            bp.t1 = row.at("t1").get<double>();
            b.boundaries = bp;
            break;
        }
        case TableKind::FixedPower: {
            FixedPowerEntry e;
            e.scenario_label = row.at("scenario").get<std::string>();
            e.n_total = row.at("n_total").get<std::int64_t>();
            e.pi2 = row.at("pi2").get<double>();
            e.effect = row.at("effect").get<double>();
            e.dropout = row.at("dropout").get<double>();
            e.alpha = row.at("alpha").get<double>();
            e.power = estimate_from(row, "power", "n_reps");
            b.fixed_power.push_back(std::move(e));
            break;
        }
        }
    }
}

} // namespace detail

// Rebuilds the bundle subset held by a JSON report (single- or multi-table).
inline ReportBundle bundle_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    ReportBundle b;
    const auto& m = j.at("metadata");
    b.metadata.seed = m.at("seed").get<std::uint64_t>();
    b.metadata.n_reps = m.at("n_reps").get<std::int64_t>();
    b.metadata.design_fingerprint = m.at("design_fingerprint").get<std::string>();
    b.metadata.tool_version = m.at("tool_version").get<std::string>();
    if (m.contains("generated_at")) b.metadata.generated_at = m.at("generated_at").get<std::string>();

    auto absorb = [&](const std::string& key, const nlohmann::json& rows) {
        const auto kind = parse_table_key(key);
        if (!kind) throw std::runtime_error("unknown table '" + key + "' in report");
        detail::absorb_rows(b, *kind, rows);
    };
    if (j.contains("tables")) {
        for (const auto& [key, rows] : j.at("tables").items()) absorb(key, rows);
    } else {
        absorb(j.at("table").get<std::string>(), j.at("rows"));
    }
    return b;
}

} // namespace aed
