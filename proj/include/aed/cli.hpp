#pragma once
// Command-line driver shared by the aed_cli executable and the tests.
//
// Exit codes: 0 success, 1 usage error, 2 configuration error,
// 3 numerical infeasibility. Nothing is written to the output stream
// unless the command succeeds.

#include "aed/boundaries.hpp"
#include "aed/config.hpp"
#include "aed/error.hpp"
#include "aed/mdd.hpp"
#include "aed/report.hpp"
#include "aed/simulation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace aed {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitInfeasible = 3 };

struct CommandOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> reps;
    std::optional<std::string> format;
    std::optional<std::string> out_path;
    unsigned threads = 0;
    bool stamp = false;
    // fixed-power
    std::int64_t n_total = 204;
    std::optional<double> alpha;
    // mdd
    std::optional<double> control_rate;
};

namespace detail {

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline RunConfig load_config(const CommandOptions& o) {
    std::string source;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path, std::ios::binary);
        if (!in) throw ConfigError("", "cannot read config file '" + o.config_path + "'");
        source.assign(std::istreambuf_iterator<char>(in), {});
    }
    RunConfig cfg = parse_config(source);
    if (o.seed) cfg.seed = *o.seed;
    if (o.reps) {
        if (*o.reps < 1) throw ConfigError("--reps", "must be at least 1");
        cfg.n_reps = *o.reps;
    }
    if (o.format) cfg.output_format = *parse_format(*o.format);
    if (o.out_path) cfg.output_path = *o.out_path;
    if (o.control_rate) {
        if (!(*o.control_rate > 0.0 && *o.control_rate < 1.0))
            throw ConfigError("--control-rate", "must lie in (0, 1)");
        cfg.mdd_control_rate = *o.control_rate;
    }
    return cfg;
}

inline ReportBundle base_bundle(const RunConfig& cfg, const CommandOptions& o) {
    ReportBundle b;
    b.metadata.seed = cfg.seed;
    b.metadata.n_reps = cfg.n_reps;
    b.metadata.design_fingerprint = design_fingerprint(cfg.design);
    if (o.stamp && cfg.output_format != Format::Text) b.metadata.generated_at = utc_timestamp();
    return b;
}

inline std::string cmd_boundaries(const RunConfig& cfg, const CommandOptions& o) {
    ReportBundle b = base_bundle(cfg, o);
    b.boundaries = design_boundaries(cfg.design);
    const TableKind kinds[] = {TableKind::Boundaries};
    return render_tables(b, kinds, cfg.output_format);
}

inline std::string cmd_mdd(const RunConfig& cfg, const CommandOptions& o) {
    ReportBundle b = base_bundle(cfg, o);
    b.mdd_table = mdd_table(cfg.design, design_boundaries(cfg.design), cfg.control_rate());
    const TableKind kinds[] = {TableKind::Mdd};
    return render_tables(b, kinds, cfg.output_format);
}

inline std::string cmd_simulate(const RunConfig& cfg, const CommandOptions& o) {
    ReportBundle b = base_bundle(cfg, o);
    for (const auto& ts : cfg.threshold_sets) {
        DesignSpec d = cfg.design;
        d.d_S = ts.d_S;
        d.d_C = ts.d_C;
        for (const auto& sc : cfg.scenarios) {
            OcEntry e{sc.label, ts.label, sc.spec, ts.d_S, ts.d_C, {}};
            e.oc = run_simulation(d, sc.spec, cfg.n_reps, cfg.seed, SimulationOptions{o.threads});
            b.oc_tables.push_back(std::move(e));
        }
    }
    const TableKind kinds[] = {TableKind::Decisions, TableKind::Power, TableKind::ConditionalPower};
    return render_tables(b, kinds, cfg.output_format);
}

// Fixed design at the full-population effect implied by each scenario.
inline std::string cmd_fixed_power(const RunConfig& cfg, const CommandOptions& o) {
    ReportBundle b = base_bundle(cfg, o);
    const double alpha = o.alpha.value_or(cfg.design.alpha_total);
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("--alpha", "must lie in (0, 0.5)");
    if (o.n_total < 4) throw ConfigError("--n", "must be at least 4");
    for (const auto& sc : cfg.scenarios) {
        const double effect =
            cfg.design.prevalence * sc.spec.effect_S + (1.0 - cfg.design.prevalence) * sc.spec.effect_C;
        FixedPowerEntry e{sc.label, o.n_total, sc.spec.pi2, effect, cfg.design.dropout, alpha, {}};
        e.power = fixed_design_power(o.n_total, sc.spec.pi2, effect, cfg.design.dropout, alpha, cfg.n_reps, cfg.seed,
                                     SimulationOptions{o.threads});
        b.fixed_power.push_back(std::move(e));
    }
    const TableKind kinds[] = {TableKind::FixedPower};
    return render_tables(b, kinds, cfg.output_format);
}

} // namespace detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-stage adaptive enrichment designs with a binary endpoint", "aed_cli"};
    app.require_subcommand(1);
    CommandOptions o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON configuration file (defaults: IMpassion031)");
        sub->add_option("--seed", o.seed, "Simulation seed");
        sub->add_option("--reps", o.reps, "Monte Carlo replications per cell");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
        sub->add_option("--out", o.out_path, "Write the report to this file instead of standard output");
        sub->add_option("--threads", o.threads, "Worker threads (0: all cores)");
        sub->add_flag("--stamp", o.stamp, "Add a generation timestamp to csv/json metadata");
    };
    auto* boundaries = app.add_subcommand("boundaries", "Solve the local significance levels");
    auto* mdd = app.add_subcommand("mdd", "Minimal detectable differences");
    auto* simulate = app.add_subcommand("simulate", "Simulate operating characteristics");
    auto* fixed = app.add_subcommand("fixed-power", "Power of the single-stage all-comers design");
    for (auto* sub : {boundaries, mdd, simulate, fixed}) add_common(sub);
    mdd->add_option("--control-rate", o.control_rate, "Observed control response rate");
    fixed->add_option("--n", o.n_total, "Total sample size");
    fixed->add_option("--alpha", o.alpha, "One-sided significance level");

    std::vector<const char*> argv{"aed_cli"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "aed_cli: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const RunConfig cfg = detail::load_config(o);
        std::string report;
        if (boundaries->parsed()) report = detail::cmd_boundaries(cfg, o);
        else if (mdd->parsed()) report = detail::cmd_mdd(cfg, o);
        else if (simulate->parsed()) report = detail::cmd_simulate(cfg, o);
        else report = detail::cmd_fixed_power(cfg, o);

        if (cfg.output_path) {
            std::ofstream file(*cfg.output_path, std::ios::binary);
            file << report;
            if (!file) {
                err << "aed_cli: cannot write '" << *cfg.output_path << "'\n";
                return kExitUsage;
            }
        } else {
            out << report;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "aed_cli: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        err << "aed_cli: infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const DomainError& e) {
        err << "aed_cli: infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    }
}

} // namespace aed
