#include "aed/adaptive_test.hpp"
#include "aed/mdd.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using aed::Arm;
using aed::InterimDecision;
using aed::StageData;
using aed::StagePValues;
using aed::Subgroup;

const aed::DesignSpec kDesign = aed::impassion031_design();
const aed::BoundaryPair kBounds =
    aed::solve_boundaries(kDesign.alpha_total, kDesign.alpha1, kDesign.information_fraction());

StageData make_stage(aed::ArmCounts s_exp, aed::ArmCounts s_ctl, aed::ArmCounts c_exp, aed::ArmCounts c_ctl) {
    StageData d;
    d.at(Subgroup::S, Arm::Experimental) = s_exp;
    d.at(Subgroup::S, Arm::Control) = s_ctl;
    d.at(Subgroup::C, Arm::Experimental) = c_exp;
    d.at(Subgroup::C, Arm::Control) = c_ctl;
    return d;
}

// Responders at observed rate `rate`, rounded away from the null: up in
// the experimental arm, down in the control arm.
std::int64_t responders(double rate, std::int64_t n, Arm arm) {
    const double x = rate * static_cast<double>(n);
    return arm == Arm::Experimental ? static_cast<std::int64_t>(std::ceil(x))
                                    : static_cast<std::int64_t>(std::floor(x));
}

// Stage data with control rate cr in both subgroups and experimental rates
// cr + delta_S in S and chosen so the F difference is at least delta_F.
StageData stage_from_differences(std::int64_t n, double prevalence, double cr, double delta_S, double delta_F) {
    const auto sizes = aed::split_arms(n);
    const auto s_exp = aed::round_half_even(static_cast<double>(sizes.experimental) * prevalence);
    const auto s_ctl = aed::round_half_even(static_cast<double>(sizes.control) * prevalence);
    const auto f_exp = responders(cr + delta_F, sizes.experimental, Arm::Experimental);
    const auto f_ctl = responders(cr, sizes.control, Arm::Control);
    const auto rs_exp = responders(cr + delta_S, s_exp, Arm::Experimental);
    const auto rs_ctl = responders(cr, s_ctl, Arm::Control);
    return make_stage({rs_exp, s_exp}, {rs_ctl, s_ctl}, {f_exp - rs_exp, sizes.experimental - s_exp},
                      {f_ctl - rs_ctl, sizes.control - s_ctl});
}

TEST(SimesP, Examples) {
    EXPECT_EQ(aed::simes_p(0.5, 0.5), 0.5);
    EXPECT_NEAR(aed::simes_p(0.01, 0.04), 0.02, 1e-15);
    EXPECT_NEAR(aed::simes_p(0.03, 0.011), 0.022, 1e-15);
}

TEST(SimesP, MatchesGeneralFormulaAndBounds) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const double a = u(rng), b = i % 7 == 0 ? a : u(rng);
        const double s = aed::simes_p(a, b);
        ASSERT_NEAR(s, static_cast<double>(oracle::simes({a, b})), 1e-12);
        ASSERT_EQ(s, aed::simes_p(b, a));
        ASSERT_GE(s, std::min(a, b));
        ASSERT_LE(s, 2.0 * std::min(a, b));
        ASSERT_LE(s, 1.0);
    }
}

TEST(Combine, Examples) {
    EXPECT_NEAR(aed::combine(0.5, 0.5, kDesign.w1, kDesign.w2), 0.5, 1e-15);
    EXPECT_NEAR(aed::combine(0.5, 0.5, 0.6, 0.8), 0.5, 1e-15);
    for (double p : {1e-6, 0.0125, 0.3, 0.77})
        EXPECT_NEAR(aed::combine(p, 0.42, 1.0, 0.0), p, 1e-12 * std::max(1.0, p));
    // The combination of two stage-wise levels of 0.0125: Z = (w1 + w2) * 2.2414.
    const double z = (kDesign.w1 + kDesign.w2) * 2.2414027276049453;
    EXPECT_NEAR(aed::combine(0.0125, 0.0125, kDesign.w1, kDesign.w2),
                static_cast<double>(1.0L - oracle::normal_cdf(z)), 1e-12);
    // mpmath
    EXPECT_NEAR(aed::combine(0.0125, 0.0125, kDesign.w1, kDesign.w2), 8.386517885931098e-4, 1e-12);
}

TEST(Combine, MatchesOracleOnRandomInputs) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6), angle(0.0, M_PI / 2);
    for (int i = 0; i < 3000; ++i) {
        const double p1 = u(rng), p2 = u(rng), th = angle(rng);
        const double w1 = std::cos(th), w2 = std::sin(th);
        ASSERT_NEAR(aed::combine(p1, p2, w1, w2), static_cast<double>(oracle::combine(p1, p2, w1, w2)), 1e-12);
    }
}

TEST(Combine, MonotoneInEachArgument) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(1e-9, 1.0 - 1e-9);
    for (int i = 0; i < 20000; ++i) {
        double a = u(rng), b = u(rng);
        const double q = u(rng);
        if (a > b) std::swap(a, b);
        ASSERT_LE(aed::combine(a, q, kDesign.w1, kDesign.w2), aed::combine(b, q, kDesign.w1, kDesign.w2));
        ASSERT_LE(aed::combine(q, a, kDesign.w1, kDesign.w2), aed::combine(q, b, kDesign.w1, kDesign.w2));
    }
}

TEST(Combine, ClampsDegenerateInputs) {
    const auto zero = aed::combine_checked(0.0, 0.5, kDesign.w1, kDesign.w2);
    EXPECT_TRUE(zero.clamped);
    EXPECT_GT(zero.p, 0.0);
    EXPECT_EQ(zero.p, aed::combine(aed::kCombineClamp, 0.5, kDesign.w1, kDesign.w2));
    const auto one = aed::combine_checked(0.5, 1.0, kDesign.w1, kDesign.w2);
    EXPECT_TRUE(one.clamped);
    EXPECT_LT(one.p, 1.0);
    EXPECT_FALSE(aed::combine_checked(0.2, 0.3, kDesign.w1, kDesign.w2).clamped);
}

TEST(InterimDecide, NoEffectIsFutility) {
    const auto s = make_stage({50, 100}, {50, 100}, {50, 100}, {50, 100});
    const auto r = aed::interim_decide(s, kDesign, kBounds);
    EXPECT_EQ(r.decision, InterimDecision::Futility);
    EXPECT_EQ(r.pvalues.p_S, 0.5);
    EXPECT_EQ(r.pvalues.p_F, 0.5);
    EXPECT_FALSE(r.empty_cell);
}

TEST(InterimDecide, SubgroupEffectOnlyContinuesWithS) {
    const auto s = make_stage({63, 100}, {50, 100}, {55, 100}, {50, 100});
    const auto r = aed::interim_decide(s, kDesign, kBounds);
    EXPECT_GT(r.pvalues.p_intersection, kBounds.alpha1);
    EXPECT_NEAR(r.risk_diff_S, 0.13, 1e-12);
    EXPECT_NEAR(r.risk_diff_C, 0.05, 1e-12);
    EXPECT_EQ(r.decision, InterimDecision::ContinueS);
}

TEST(InterimDecide, ThresholdsAreInclusive) {
    // 12/50 - 6/50 is 0.12 up to rounding in binary
    const auto s = make_stage({12, 50}, {6, 50}, {10, 50}, {5, 50});
    const auto r = aed::interim_decide(s, kDesign, kBounds);
    EXPECT_EQ(r.decision, InterimDecision::ContinueBoth);
    const auto below = make_stage({11, 50}, {6, 50}, {9, 50}, {5, 50});
    EXPECT_EQ(aed::interim_decide(below, kDesign, kBounds).decision, InterimDecision::Futility);
}

TEST(InterimDecide, ComplementEffectOnlyContinuesWithF) {
    const auto s = make_stage({25, 50}, {25, 50}, {31, 50}, {25, 50});
    EXPECT_EQ(aed::interim_decide(s, kDesign, kBounds).decision, InterimDecision::ContinueF);
}

TEST(InterimDecide, FullPopulationDifferenceAtStageOneMddStopsForEfficacyInF) {
    const double cr = 0.456;
    aed::MddRequest req{aed::Population::F, 1, aed::Continuation::NotApplicable, true, cr, kDesign, kBounds};
    const double delta = aed::mdd(req).delta;
    EXPECT_NEAR(delta, 0.17, 0.015);
    const auto s = stage_from_differences(kDesign.n1, kDesign.prevalence, cr, delta, delta);
    const auto r = aed::interim_decide(s, kDesign, kBounds);
    const double diff_F = s.full(Arm::Experimental).proportion() - s.full(Arm::Control).proportion();
    EXPECT_GE(diff_F, 0.17);
    EXPECT_TRUE(r.decision == InterimDecision::EfficacyF || r.decision == InterimDecision::EfficacyBoth)
        << aed::decision_key(r.decision);
}

TEST(InterimDecide, EmptyCellIsFlagged) {
    const auto s = make_stage({0, 0}, {3, 10}, {8, 20}, {6, 20});
    const auto r = aed::interim_decide(s, kDesign, kBounds);
    EXPECT_TRUE(r.empty_cell);
    EXPECT_EQ(r.pvalues.p_S, 0.5);
    EXPECT_NEAR(r.risk_diff_S, -0.3, 1e-15);
}

TEST(InterimDecide, EfficacyPrecedesThresholds) {
    // S is overwhelming, F follows through pooling
    const auto s = make_stage({45, 50}, {10, 50}, {30, 50}, {26, 50});
    const auto r = aed::interim_decide(s, kDesign, kBounds);
    EXPECT_TRUE(aed::is_efficacy(r.decision));
}

TEST(FinalDecide, NullContinuationRejectsNothing) {
    const StagePValues p1{0.5, 0.5, 0.5}, p2{0.5, 0.5, 0.5};
    const auto r = aed::final_decide(p1, p2, InterimDecision::ContinueS, kDesign, kBounds);
    EXPECT_FALSE(r.any());
}

TEST(FinalDecide, StrongSubgroupEvidenceRejectsS) {
    const StagePValues p1{1e-6, 0.5, 1e-6}, p2{1e-6, 0.5, 0.5};
    const auto r = aed::final_decide(p1, p2, InterimDecision::ContinueS, kDesign, kBounds);
    EXPECT_TRUE(r.reject_S);
    EXPECT_EQ(r.stage_S, aed::RejectionStage::Two);
    EXPECT_FALSE(r.reject_F);
    EXPECT_EQ(r.stage_F, aed::RejectionStage::None);
}

TEST(FinalDecide, DroppedPopulationIsNeverRejected) {
    const StagePValues tiny{1e-8, 1e-8, 2e-8};
    EXPECT_FALSE(aed::final_decide(tiny, tiny, InterimDecision::ContinueS, kDesign, kBounds).reject_F);
    EXPECT_FALSE(aed::final_decide(tiny, tiny, InterimDecision::ContinueF, kDesign, kBounds).reject_S);
    const auto both = aed::final_decide(tiny, tiny, InterimDecision::ContinueBoth, kDesign, kBounds);
    EXPECT_TRUE(both.reject_F && both.reject_S);
    for (auto d : {InterimDecision::EfficacyF, InterimDecision::Futility})
        EXPECT_FALSE(aed::final_decide(tiny, tiny, d, kDesign, kBounds).any());
}

TEST(FinalDecide, DroppedPopulationLeavesIntersectionToRemainingOne) {
    // stage-2 S p-value small, F p-value large: the S-only intersection is p2_S
    const StagePValues p1{0.02, 0.3, 0.04};
    const StagePValues p2{0.004, 0.9, 0.008};
    const auto r = aed::final_decide(p1, p2, InterimDecision::ContinueS, kDesign, kBounds);
    EXPECT_EQ(r.reject_S, aed::combine(0.04, 0.004, kDesign.w1, kDesign.w2) <= kBounds.alpha2 &&
                              aed::combine(0.02, 0.004, kDesign.w1, kDesign.w2) <= kBounds.alpha2);
    EXPECT_TRUE(r.reject_S);
}

TEST(FinalDecide, ContinueBothAtFullPopulationMddRejectsF) {
    const double cr = 0.456;
    aed::MddRequest req{aed::Population::F, 2, aed::Continuation::Both, true, cr, kDesign, kBounds};
    const double delta_F = aed::mdd(req).delta;
    EXPECT_NEAR(delta_F, 0.14, 0.015);
    const double delta_S = 0.17;
    const auto s1 = stage_from_differences(kDesign.n1, kDesign.prevalence, cr, delta_S, delta_F);
    const auto s2 = stage_from_differences(kDesign.n2, kDesign.prevalence, cr, delta_S, delta_F);
    const auto interim = aed::interim_decide(s1, kDesign, kBounds);
    ASSERT_FALSE(aed::is_efficacy(interim.decision));
    const auto r = aed::final_decide(interim.pvalues, s2, InterimDecision::ContinueBoth, kDesign, kBounds);
    EXPECT_TRUE(r.reject_F);
}

TEST(FinalDecide, SymmetricInPopulationsWhenPValuesMatch) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(1e-5, 0.2);
    for (int i = 0; i < 5000; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const StagePValues p1{a, b, aed::simes_p(a, b)}, p1_swapped{b, a, aed::simes_p(a, b)};
        const StagePValues p2{c, c, c};
        const auto r = aed::final_decide(p1, p2, InterimDecision::ContinueBoth, kDesign, kBounds);
        const auto s = aed::final_decide(p1_swapped, p2, InterimDecision::ContinueBoth, kDesign, kBounds);
        ASSERT_EQ(r.reject_F, s.reject_S);
        ASSERT_EQ(r.reject_S, s.reject_F);
    }
}

TEST(FinalDecide, ClosedTestingMonotoneInOwnPValue) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(1e-5, 0.3), shrink(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double s1 = u(rng), f1 = u(rng), s2 = u(rng), f2 = u(rng);
        const StagePValues p1{s1, f1, aed::simes_p(s1, f1)};
        const StagePValues p2{s2, f2, aed::simes_p(s2, f2)};
        const auto base = aed::final_decide(p1, p2, InterimDecision::ContinueBoth, kDesign, kBounds);
        if (!base.reject_S) continue;
        const double s2_lower = s2 * shrink(rng);
        const StagePValues q2{s2_lower, f2, aed::simes_p(s2_lower, f2)};
        ASSERT_TRUE(aed::final_decide(p1, q2, InterimDecision::ContinueBoth, kDesign, kBounds).reject_S);
        const double s1_lower = s1 * shrink(rng);
        const StagePValues q1{s1_lower, f1, aed::simes_p(s1_lower, f1)};
        ASSERT_TRUE(aed::final_decide(q1, p2, InterimDecision::ContinueBoth, kDesign, kBounds).reject_S);
    }
}

TEST(InterimDecide, StageOneRejectionMonotoneInSubgroupEvidence) {
    for (int c_exp = 20; c_exp <= 40; c_exp += 4)
        for (int s_base = 20; s_base <= 45; ++s_base) {
            const auto base = make_stage({s_base, 50}, {20, 50}, {c_exp, 55}, {25, 55});
            if (!aed::stage1_rejections(aed::interim_decide(base, kDesign, kBounds).decision).reject_S) continue;
            for (int more = s_base + 1; more <= 50; ++more) {
                const auto better = make_stage({more, 50}, {20, 50}, {c_exp, 55}, {25, 55});
                EXPECT_TRUE(
                    aed::stage1_rejections(aed::interim_decide(better, kDesign, kBounds).decision).reject_S);
            }
        }
}

TEST(DecisionLabels, MatchTableRows) {
    EXPECT_EQ(aed::decision_label(InterimDecision::EfficacyF), "1a - Stop after stage 1: efficacy in F only");
    EXPECT_EQ(aed::decision_label(InterimDecision::ContinueBoth), "5 - Continue to stage 2: F and S");
    EXPECT_EQ(aed::decision_key(InterimDecision::ContinueS), "continue_s");
    for (auto d : aed::kAllDecisions) EXPECT_NE(aed::is_efficacy(d), aed::is_continuation(d) || d == InterimDecision::Futility);
}

} // namespace
