#pragma once
// Minimal detectable differences: the smallest observed absolute risk
// difference that leads to rejection, for stage 1 and for each stage-2
// continuation, given a fixed observed control rate.

#include "aed/adaptive_test.hpp"
#include "aed/boundaries.hpp"
#include "aed/design.hpp"
#include "aed/error.hpp"
#include "aed/prop_test.hpp"
#include "aed/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace aed {

enum class Continuation : std::uint8_t { NotApplicable = 0, SOnly = 1, FOnly = 2, Both = 3 };

inline const char* to_string(Continuation c) noexcept {
    switch (c) {
    case Continuation::SOnly: return "s_only";
    case Continuation::FOnly: return "f_only";
    case Continuation::Both: return "both";
    default: return "not_applicable";
    }
}

struct MddRequest {
    Population population = Population::F;
    int stage = 1;
    Continuation continuation = Continuation::NotApplicable;
    bool conservative = true;
    double control_rate = 0.456;
    DesignSpec design{};
    BoundaryPair boundaries{};
};

struct MddResult {
    double delta = 0.0;
    double level = 0.0;  // local level the governing p-value is compared to
    std::string assumptions;
};

inline constexpr double kMddPValueTolerance = 1e-12;

inline void validate(const MddRequest& r) {
    if (r.stage != 1 && r.stage != 2) throw DomainError("MddRequest: stage must be 1 or 2");
    if ((r.stage == 1) != (r.continuation == Continuation::NotApplicable))
        throw DomainError("MddRequest: continuation applies to stage 2 only");
    if (r.continuation == Continuation::SOnly && r.population != Population::S)
        throw DomainError("MddRequest: S-only continuation tests S");
    if (r.continuation == Continuation::FOnly && r.population != Population::F)
        throw DomainError("MddRequest: F-only continuation tests F");
    if (!(r.control_rate > 0.0 && r.control_rate < 1.0))
        throw DomainError("MddRequest: control rate must lie in (0, 1)");
}

// Signed-test p-value at observed proportions (control_rate + delta, control_rate).
inline double observed_pvalue(double delta, const ArmSizes& sizes, double control_rate) noexcept {
    return one_sided_p(control_rate + delta, static_cast<double>(sizes.experimental), control_rate,
                       static_cast<double>(sizes.control));
}

namespace detail {

// Solve g(delta) = 0 on [0, 1 - control_rate) for increasing-in-delta
// rejection (g decreasing from positive to negative).
template <class G>
double solve_delta(G&& g, double control_rate) {
    if (g(0.0) <= kMddPValueTolerance) return 0.0;
    const double hi = std::nextafter(1.0 - control_rate, 0.0);
    if (g(hi) > 0.0)
        throw InfeasibleError("mdd: no observed difference below 1 - control rate reaches the level");
    RootOptions opt;
    opt.x_tol = 1e-14;
    opt.f_tol = kMddPValueTolerance;
    return brent_root(g, 0.0, hi, opt).x;
}

inline double doubled(double p) noexcept { return std::min(2.0 * p, 1.0); }

} // namespace detail

inline double mdd_single_stage(const ArmSizes& sizes, double control_rate, double level) {
    if (sizes.experimental < 1 || sizes.control < 1)
        throw DomainError("mdd_single_stage: both arms need subjects");
    if (!(control_rate > 0.0 && control_rate < 1.0))
        throw DomainError("mdd_single_stage: control rate must lie in (0, 1)");
    if (!(level > 0.0 && level <= 0.5))
        throw DomainError("mdd_single_stage: level must lie in (0, 0.5]");
    return detail::solve_delta(
        [&](double d) { return observed_pvalue(d, sizes, control_rate) - level; }, control_rate);
}

inline double mdd_single_stage(std::int64_t n_per_arm, double control_rate, double level) {
    if (n_per_arm < 2) throw DomainError("mdd_single_stage: need at least 2 subjects per arm");
    return mdd_single_stage(ArmSizes{n_per_arm, n_per_arm}, control_rate, level);
}

// Per-arm sizes behind each MDD. Subgroup sizes are the expected count
// n * prevalence rounded half to even. After enrichment every stage-2
// subject belongs to S.
inline ArmSizes mdd_arm_sizes(const DesignSpec& d, int stage, Population pop, Continuation cont) {
    const std::int64_t n = stage == 1 ? d.n1 : d.n2;
    if (pop == Population::F || (stage == 2 && cont == Continuation::SOnly))
        return split_arms(n, d.alloc_ratio);
    return split_arms(round_half_even(static_cast<double>(n) * d.prevalence), d.alloc_ratio);
}

// Value of the p-value chain that governs rejection at observed difference
// delta, to be compared with MddResult::level.
inline double mdd_governing_pvalue(const MddRequest& r, double delta) {
    const double p1 = observed_pvalue(delta, mdd_arm_sizes(r.design, 1, r.population, r.continuation),
                                      r.control_rate);
    if (r.stage == 1) return r.conservative ? detail::doubled(p1) : p1;

    const double p2 = observed_pvalue(delta, mdd_arm_sizes(r.design, 2, r.population, r.continuation),
                                      r.control_rate);
    bool adjust1 = true, adjust2 = false;
    if (r.continuation == Continuation::Both) adjust1 = adjust2 = r.conservative;
    return combine(adjust1 ? detail::doubled(p1) : p1, adjust2 ? detail::doubled(p2) : p2,
                   r.design.w1, r.design.w2);
}

inline MddResult mdd_stage1(const MddRequest& r) {
    validate(r);
    if (r.stage != 1) throw DomainError("mdd_stage1: request is for stage 2");
    MddResult out;
    out.level = r.boundaries.alpha1;
    const ArmSizes sizes = mdd_arm_sizes(r.design, 1, r.population, r.continuation);
    // Adjusted 2p <= alpha1 is the same as p <= alpha1 / 2.
    out.delta = mdd_single_stage(sizes, r.control_rate, r.conservative ? out.level / 2.0 : out.level);
    out.assumptions = r.conservative
        ? std::string("intersection test driven by ") + to_string(r.population) +
              " alone (adjusted p-value 2p)"
        : std::string("other population also significant with a smaller p-value (raw p-value)");
    return out;
}

inline MddResult mdd_stage2(const MddRequest& r) {
    validate(r);
    if (r.stage != 2) throw DomainError("mdd_stage2: request is for stage 1");
    MddResult out;
    out.level = r.boundaries.alpha2;
    out.delta = detail::solve_delta(
        [&](double d) { return mdd_governing_pvalue(r, d) - out.level; }, r.control_rate);
    std::string a = "identical observed proportions in both stages; ";
    if (r.continuation == Continuation::Both)
        a += r.conservative ? "intersection driven by the tested population in both stages (2p, 2p)"
                            : "other population drives the intersection in both stages (raw p-values)";
    else
        a += "stage-1 intersection driven by the continued population (2p stage 1, raw stage 2)";
    out.assumptions = std::move(a);
    return out;
}

inline MddResult mdd(const MddRequest& r) { return r.stage == 1 ? mdd_stage1(r) : mdd_stage2(r); }

struct MddEntry {
    MddRequest request;
    MddResult result;
};

// The ten-cell grid: stage 1 for S and F (conservative, liberal), stage 2
// for S only, F only, and both populations (conservative, liberal).
inline std::vector<MddEntry> mdd_table(const DesignSpec& design, const BoundaryPair& bounds,
                                       double control_rate) {
    struct Cell { Population pop; int stage; Continuation cont; bool conservative; };
    constexpr Cell cells[] = {
        {Population::S, 1, Continuation::NotApplicable, true},
        {Population::S, 1, Continuation::NotApplicable, false},
        {Population::F, 1, Continuation::NotApplicable, true},
        {Population::F, 1, Continuation::NotApplicable, false},
        {Population::S, 2, Continuation::SOnly, true},
        {Population::F, 2, Continuation::FOnly, true},
        {Population::S, 2, Continuation::Both, true},
        {Population::S, 2, Continuation::Both, false},
        {Population::F, 2, Continuation::Both, true},
        {Population::F, 2, Continuation::Both, false},
    };
    std::vector<MddEntry> out;
    out.reserve(std::size(cells));
    for (const auto& c : cells) {
        MddRequest r{c.pop, c.stage, c.cont, c.conservative, control_rate, design, bounds};
        out.push_back({r, mdd(r)});
    }
    return out;
}

} // namespace aed
