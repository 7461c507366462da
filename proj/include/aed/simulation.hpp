#pragma once
// Monte Carlo operating characteristics of the two-stage enrichment design.

#include "aed/adaptive_test.hpp"
#include "aed/boundaries.hpp"
#include "aed/design.hpp"
#include "aed/philox.hpp"
#include "aed/prop_test.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

namespace aed {

// A relative frequency with its Monte Carlo standard error.
struct Estimate {
    std::int64_t events = 0;
    std::int64_t trials = 0;
    double value = 0.0;
    double mc_se = 0.0;
    bool defined = true;  // false when the denominator was too small to report

    static Estimate from_counts(std::int64_t events, std::int64_t trials,
                                std::int64_t min_trials = 1) {
        Estimate e;
        e.events = events;
        e.trials = trials;
        e.defined = trials >= min_trials && trials > 0;
        if (trials > 0) {
            e.value = static_cast<double>(events) / static_cast<double>(trials);
            e.mc_se = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
        }
        return e;
    }
};

// Conditional powers rest on fewer than this many continued trials are
// reported as undefined.
inline constexpr std::int64_t kMinConditionalTrials = 100;

struct OperatingCharacteristics {
    std::int64_t n_reps = 0;
    std::array<Estimate, kDecisionCount> decisions{};  // indexed by InterimDecision
    Estimate power_F, power_S, power_F_or_S, power_F_and_S;
    Estimate cond_power_F_only;  // P(reject F | continue with F only)
    Estimate cond_power_S_only;  // P(reject S | continue with S only)
    Estimate cond_power_both;    // P(reject F or S | continue with both)

    const Estimate& decision(InterimDecision d) const noexcept {
        return decisions[static_cast<std::size_t>(d)];
    }
    double stage1_efficacy() const noexcept {
        return decision(InterimDecision::EfficacyF).value + decision(InterimDecision::EfficacyS).value +
               decision(InterimDecision::EfficacyBoth).value;
    }
};

struct TrialOutcome {
    StageData stage1;
    std::optional<StageData> stage2;
    InterimResult interim;
    FinalRejections final;
};

// Enrolls n subjects: exact arm split, Bernoulli(prevalence) biomarker
// status and Bernoulli((1 - dropout) * rate) response per subject.
inline StageData draw_stage(std::int64_t n, double prevalence, const DesignSpec& design,
                            const ScenarioSpec& scenario, PhiloxStream& stream) {
    StageData out;
    const ArmSizes sizes = split_arms(n, design.alloc_ratio);
    const double keep = 1.0 - design.dropout;
    for (const Arm arm : {Arm::Experimental, Arm::Control}) {
        const std::int64_t count = arm == Arm::Experimental ? sizes.experimental : sizes.control;
        const double rate_S = keep * scenario.rate(Subgroup::S, arm);
        const double rate_C = keep * scenario.rate(Subgroup::C, arm);
        for (std::int64_t i = 0; i < count; ++i) {
            const bool positive = stream.uniform() < prevalence;
            const bool response = stream.uniform() < (positive ? rate_S : rate_C);
            ArmCounts& cell = out.at(positive ? Subgroup::S : Subgroup::C, arm);
            ++cell.total;
            cell.responders += response ? 1 : 0;
        }
    }
    return out;
}

inline TrialOutcome simulate_trial(const DesignSpec& design, const ScenarioSpec& scenario,
                                   const BoundaryPair& bounds, PhiloxStream& stream) {
    TrialOutcome out;
    out.stage1 = draw_stage(design.n1, design.prevalence, design, scenario, stream);
    out.interim = interim_decide(out.stage1, design, bounds);
    if (!is_continuation(out.interim.decision)) {
        out.final = stage1_rejections(out.interim.decision);
        return out;
    }
    // Enrichment: only biomarker-positive subjects enter stage 2.
    const double prevalence2 =
        out.interim.decision == InterimDecision::ContinueS ? 1.0 : design.prevalence;
    out.stage2 = draw_stage(design.n2, prevalence2, design, scenario, stream);
    out.final = final_decide(out.interim.pvalues, *out.stage2, out.interim.decision, design, bounds);
    return out;
}

inline BoundaryPair design_boundaries(const DesignSpec& design) {
    return solve_boundaries(design.alpha_total, design.alpha1, design.information_fraction());
}

inline TrialOutcome simulate_trial(const DesignSpec& design, const ScenarioSpec& scenario,
                                   PhiloxStream& stream) {
    return simulate_trial(design, scenario, design_boundaries(design), stream);
}

struct SimulationOptions {
    unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

inline unsigned resolve_threads(unsigned requested, std::int64_t work) {
    unsigned t = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::clamp<std::int64_t>(t, 1, std::max<std::int64_t>(work, 1)));
}

// Runs body(i) for i in [0, n) on contiguous chunks, one per thread.
template <class Body>
void parallel_for(std::int64_t n, unsigned threads, Body&& body) {
    threads = resolve_threads(threads, n);
    if (threads == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::int64_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::int64_t begin = static_cast<std::int64_t>(t) * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&body, begin, end] {
            for (std::int64_t i = begin; i < end; ++i) body(i);
        });
    }
}

// Per-replication summary packed into one byte: decision in the low bits,
// rejection of F and S in bits 4 and 5.
inline std::uint8_t pack(const TrialOutcome& t) noexcept {
    return static_cast<std::uint8_t>(static_cast<unsigned>(t.interim.decision) |
                                     (t.final.reject_F ? 0x10u : 0u) | (t.final.reject_S ? 0x20u : 0u));
}

} // namespace detail

// Aggregates n_reps trials; replication i draws from PhiloxStream(seed, i),
// so the result does not depend on the thread count.
inline OperatingCharacteristics run_simulation(const DesignSpec& design, const ScenarioSpec& scenario,
                                               std::int64_t n_reps, std::uint64_t seed,
                                               const SimulationOptions& options = {}) {
    if (n_reps < 1) throw DomainError("run_simulation: n_reps must be at least 1");
    validate(design);
    validate(scenario);
    const BoundaryPair bounds = design_boundaries(design);

    std::vector<std::uint8_t> packed(static_cast<std::size_t>(n_reps));
    detail::parallel_for(n_reps, options.threads, [&](std::int64_t i) {
        PhiloxStream stream(seed, static_cast<std::uint64_t>(i));
        packed[static_cast<std::size_t>(i)] = detail::pack(simulate_trial(design, scenario, bounds, stream));
    });

    std::array<std::int64_t, kDecisionCount> decision_counts{};
    std::int64_t rej_F = 0, rej_S = 0, rej_any = 0, rej_both = 0;
    std::array<std::int64_t, kDecisionCount> cond_events{};
    for (const std::uint8_t code : packed) {
        const auto d = static_cast<InterimDecision>(code & 0x0F);
        const bool f = (code & 0x10) != 0;
        const bool s = (code & 0x20) != 0;
        ++decision_counts[static_cast<std::size_t>(d)];
        rej_F += f;
        rej_S += s;
        rej_any += f || s;
        rej_both += f && s;
        if (d == InterimDecision::ContinueF) cond_events[static_cast<std::size_t>(d)] += f;
        if (d == InterimDecision::ContinueS) cond_events[static_cast<std::size_t>(d)] += s;
        if (d == InterimDecision::ContinueBoth) cond_events[static_cast<std::size_t>(d)] += f || s;
    }

    OperatingCharacteristics oc;
    oc.n_reps = n_reps;
    for (std::size_t k = 0; k < kDecisionCount; ++k)
        oc.decisions[k] = Estimate::from_counts(decision_counts[k], n_reps);
    oc.power_F = Estimate::from_counts(rej_F, n_reps);
    oc.power_S = Estimate::from_counts(rej_S, n_reps);
    oc.power_F_or_S = Estimate::from_counts(rej_any, n_reps);
    oc.power_F_and_S = Estimate::from_counts(rej_both, n_reps);
    auto conditional = [&](InterimDecision d) {
        const auto k = static_cast<std::size_t>(d);
        return Estimate::from_counts(cond_events[k], decision_counts[k], kMinConditionalTrials);
    };
    oc.cond_power_F_only = conditional(InterimDecision::ContinueF);
    oc.cond_power_S_only = conditional(InterimDecision::ContinueS);
    oc.cond_power_both = conditional(InterimDecision::ContinueBoth);
    return oc;
}

// Rejection rate of the single-stage all-comers design with the pooled
// one-sided test at level alpha.
inline Estimate fixed_design_power(std::int64_t n_total, double pi2, double effect, double dropout,
                                   double alpha, std::int64_t n_reps, std::uint64_t seed,
                                   const SimulationOptions& options = {}) {
    if (n_total < 4) throw DomainError("fixed_design_power: need at least 4 subjects");
    if (n_reps < 1) throw DomainError("fixed_design_power: n_reps must be at least 1");
    if (!(pi2 > 0.0 && pi2 < 1.0) || !(pi2 + effect >= 0.0 && pi2 + effect <= 1.0))
        throw DomainError("fixed_design_power: response rates must lie in [0, 1]");
    const ArmSizes sizes = split_arms(n_total);
    const double keep = 1.0 - dropout;
    std::vector<std::uint8_t> rejected(static_cast<std::size_t>(n_reps));
    detail::parallel_for(n_reps, options.threads, [&](std::int64_t i) {
        PhiloxStream stream(seed, static_cast<std::uint64_t>(i));
        ArmCounts exp{0, sizes.experimental}, ctrl{0, sizes.control};
        for (std::int64_t j = 0; j < exp.total; ++j) exp.responders += stream.bernoulli(keep * (pi2 + effect));
        for (std::int64_t j = 0; j < ctrl.total; ++j) ctrl.responders += stream.bernoulli(keep * pi2);
        rejected[static_cast<std::size_t>(i)] = one_sided_p(exp, ctrl) <= alpha;
    });
    std::int64_t events = 0;
    for (const auto r : rejected) events += r;
    return Estimate::from_counts(events, n_reps);
}

} // namespace aed
