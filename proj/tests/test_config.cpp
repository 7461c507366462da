#include "aed/config.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

std::string field_of(std::string_view doc) {
    try {
        aed::parse_config(doc);
    } catch (const aed::ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
    for (std::string_view doc : {"", "  \n", "{}"}) {
        const auto cfg = aed::parse_config(doc);
        EXPECT_EQ(cfg.design, aed::impassion031_design());
        EXPECT_EQ(cfg.design.n1, 205);
        EXPECT_EQ(cfg.design.n2, 120);
        EXPECT_EQ(cfg.design.alpha_total, 0.025);
        EXPECT_EQ(cfg.design.alpha1, 0.0125);
        EXPECT_EQ(cfg.design.prevalence, 0.47);
        EXPECT_EQ(cfg.design.dropout, 0.05);
        EXPECT_EQ(cfg.design.d_S, 0.12);
        EXPECT_EQ(cfg.design.d_C, 0.10);
        ASSERT_EQ(cfg.scenarios.size(), 3u);
        ASSERT_EQ(cfg.threshold_sets.size(), 2u);
        EXPECT_EQ(cfg.threshold_sets[1].d_S, 0.15);
        EXPECT_EQ(cfg.threshold_sets[1].d_C, 0.12);
        EXPECT_EQ(cfg.n_reps, 100000);
        EXPECT_EQ(cfg.output_format, aed::Format::Text);
        EXPECT_FALSE(cfg.output_path);
        EXPECT_NEAR(cfg.control_rate(), 0.456, 1e-15);
    }
}

TEST(ParseConfig, ScenarioList) {
    const auto cfg = aed::parse_config(R"({"scenarios": [
        {"label": "1", "pi2": 0.48, "effect_s": 0.20, "effect_c": 0.20},
        {"label": "2", "pi2": 0.48, "effect_s": 0.20, "effect_c": 0.12},
        {"label": "3", "pi2": 0.48, "effect_s": 0.20, "effect_c": 0.04}]})");
    ASSERT_EQ(cfg.scenarios.size(), 3u);
    const double effect_c[] = {0.20, 0.12, 0.04};
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(cfg.scenarios[i].spec.pi2, 0.48);
        EXPECT_EQ(cfg.scenarios[i].spec.effect_S, 0.20);
        EXPECT_EQ(cfg.scenarios[i].spec.effect_C, effect_c[i]);
        EXPECT_EQ(cfg.scenarios[i].spec, aed::impassion031_scenarios()[i].spec);
        EXPECT_EQ(cfg.scenarios[i].label, std::to_string(i + 1));
    }
}

TEST(ParseConfig, OverridesAndDerivedWeights) {
    const auto cfg = aed::parse_config(R"({"design": {"n1": 100, "n2": 300, "spend_fraction": 0.4},
        "n_reps": 500, "seed": 3, "output_format": "csv", "mdd_control_rate": 0.3})");
    EXPECT_EQ(cfg.design.n1, 100);
    EXPECT_NEAR(cfg.design.alpha1, 0.01, 1e-15);
    EXPECT_NEAR(cfg.design.w1 * cfg.design.w1, 0.25, 1e-15);
    EXPECT_EQ(cfg.n_reps, 500);
    EXPECT_EQ(cfg.seed, 3u);
    EXPECT_EQ(cfg.output_format, aed::Format::Csv);
    EXPECT_EQ(cfg.control_rate(), 0.3);
}

TEST(ParseConfig, ErrorsNameTheField) {
    EXPECT_EQ(field_of(R"({"design": {"prevalence": 1.3}})"), "design.prevalence");
    EXPECT_EQ(field_of(R"({"design": {"n1": 1}})"), "design.n1");
    EXPECT_EQ(field_of(R"({"design": {"alpha1": 0.01, "spend_fraction": 0.5}})"), "design.alpha1");
    EXPECT_EQ(field_of(R"({"design": {"w1": 0.5}})"), "design.w1");
    EXPECT_EQ(field_of(R"({"scenarios": [{"pi2": 0.48}, {"pi2": 1.5}]})"), "scenarios[1].pi2");
    EXPECT_EQ(field_of(R"({"scenarios": []})"), "scenarios");
    EXPECT_EQ(field_of(R"({"n_reps": 0})"), "n_reps");
    EXPECT_EQ(field_of(R"({"seed": -4})"), "seed");
    EXPECT_EQ(field_of(R"({"output_format": "xml"})"), "output_format");
    EXPECT_EQ(field_of(R"({"design": {"n1": "many"}})"), "design.n1");
}

TEST(ParseConfig, UnknownKeysAreRejected) {
    EXPECT_EQ(field_of(R"({"desgin": {}})"), "desgin");
    EXPECT_EQ(field_of(R"({"design": {"prevalance": 0.4}})"), "design.prevalance");
    EXPECT_EQ(field_of(R"({"threshold_sets": [{"label": "x", "d_s": 0.1, "d_c": 0.1, "extra": 1}]})"),
              "threshold_sets[0].extra");
}

TEST(ParseConfig, MalformedDocumentReportsPosition) {
    try {
        aed::parse_config("{\n  \"n_reps\": 10,\n  oops\n}");
        FAIL() << "expected a ConfigError";
    } catch (const aed::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

} // namespace
