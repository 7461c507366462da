#pragma once
// Pre-specified design parameters, true-effect scenarios and stage data.

#include "aed/error.hpp"
#include "aed/prop_test.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace aed {

enum class Subgroup : std::uint8_t { S = 0, C = 1 };   // biomarker positive / negative
enum class Arm : std::uint8_t { Experimental = 0, Control = 1 };
enum class Population : std::uint8_t { S = 0, F = 1 }; // tested populations

inline const char* to_string(Population p) noexcept { return p == Population::S ? "S" : "F"; }

struct DesignSpec {
    std::int64_t n1 = 205;
    std::int64_t n2 = 120;
    double alloc_ratio = 1.0;     // experimental : control
    double alpha_total = 0.025;   // one-sided
    double alpha1 = 0.0125;
    double w1 = std::sqrt(205.0 / 325.0);
    double w2 = std::sqrt(120.0 / 325.0);
    double prevalence = 0.47;     // biomarker-positive fraction
    double dropout = 0.05;        // drop-outs count as non-responders
    double d_S = 0.12;            // continuation threshold on the S risk difference
    double d_C = 0.10;            // continuation threshold on the C risk difference

    double information_fraction() const noexcept { return w1 * w1; }

    // Weights w1^2 = n1 / (n1 + n2), w2^2 = n2 / (n1 + n2).
    void set_sample_size_weights() {
        const double total = static_cast<double>(n1 + n2);
        w1 = std::sqrt(static_cast<double>(n1) / total);
        w2 = std::sqrt(static_cast<double>(n2) / total);
    }

    friend bool operator==(const DesignSpec&, const DesignSpec&) = default;
};

// The two-stage enrichment design of the IMpassion031 amendment.
inline DesignSpec impassion031_design() { return DesignSpec{}; }

inline void validate(const DesignSpec& d) {
    auto require = [](bool ok, const char* field, const char* msg) {
        if (!ok) throw ConfigError(field, msg);
    };
    require(d.n1 >= 2, "n1", "stage-1 sample size must be at least 2");
    require(d.n2 >= 2, "n2", "stage-2 sample size must be at least 2");
    require(d.alloc_ratio > 0.0 && std::isfinite(d.alloc_ratio), "alloc_ratio",
            "allocation ratio must be positive");
    require(d.alpha_total > 0.0 && d.alpha_total < 0.5, "alpha", "must lie in (0, 0.5)");
    require(d.alpha1 > 0.0 && d.alpha1 < d.alpha_total, "alpha1", "must lie in (0, alpha)");
    require(d.w1 > 0.0 && d.w2 > 0.0, "weights", "combination weights must be positive");
    require(std::fabs(d.w1 * d.w1 + d.w2 * d.w2 - 1.0) <= 1e-12, "weights",
            "w1^2 + w2^2 must equal 1");
    require(d.prevalence > 0.0 && d.prevalence < 1.0, "prevalence", "must lie in (0, 1)");
    require(d.dropout >= 0.0 && d.dropout < 1.0, "dropout", "must lie in [0, 1)");
    require(d.d_S > -1.0 && d.d_S < 1.0, "d_s", "must lie in (-1, 1)");
    require(d.d_C > -1.0 && d.d_C < 1.0, "d_c", "must lie in (-1, 1)");
}

// True response rates: control rate shared by S and C, additive effects.
struct ScenarioSpec {
    double pi2 = 0.48;
    double effect_S = 0.20;
    double effect_C = 0.20;

    double rate(Subgroup g, Arm a) const noexcept {
        if (a == Arm::Control) return pi2;
        return pi2 + (g == Subgroup::S ? effect_S : effect_C);
    }

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

inline void validate(const ScenarioSpec& s) {
    if (!(s.pi2 > 0.0 && s.pi2 < 1.0)) throw ConfigError("pi2", "must lie in (0, 1)");
    if (!(s.pi2 + s.effect_S >= 0.0 && s.pi2 + s.effect_S <= 1.0))
        throw ConfigError("effect_s", "pi2 + effect_s must lie in [0, 1]");
    if (!(s.pi2 + s.effect_C >= 0.0 && s.pi2 + s.effect_C <= 1.0))
        throw ConfigError("effect_c", "pi2 + effect_c must lie in [0, 1]");
}

// Counts of one stage by subgroup and arm. Full-population counts are sums.
struct StageData {
    std::array<std::array<ArmCounts, 2>, 2> cells{};

    ArmCounts& at(Subgroup g, Arm a) noexcept {
        return cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
    }
    const ArmCounts& at(Subgroup g, Arm a) const noexcept {
        return cells[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
    }
    ArmCounts full(Arm a) const noexcept { return at(Subgroup::S, a) + at(Subgroup::C, a); }
    ArmCounts population(Population p, Arm a) const noexcept {
        return p == Population::S ? at(Subgroup::S, a) : full(a);
    }
    std::int64_t enrolled() const noexcept {
        return full(Arm::Experimental).total + full(Arm::Control).total;
    }

    friend bool operator==(const StageData&, const StageData&) = default;
};

struct ArmSizes {
    std::int64_t experimental = 0;
    std::int64_t control = 0;
};

// Splits n subjects by the allocation ratio; an indivisible remainder goes
// to the experimental arm (205 at 1:1 gives 103 / 102).
inline ArmSizes split_arms(std::int64_t n, double alloc_ratio = 1.0) {
    const double share = static_cast<double>(n) * alloc_ratio / (1.0 + alloc_ratio);
    auto exp = static_cast<std::int64_t>(std::ceil(share - 1e-9));
    if (exp > n) exp = n;
    return {exp, n - exp};
}

// Round half to even, as used for expected subgroup sizes.
inline std::int64_t round_half_even(double x) {
    return static_cast<std::int64_t>(std::nearbyint(x));
}

} // namespace aed
