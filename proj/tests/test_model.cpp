#include "contract_lab/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace contract_lab;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
    for (const auto& v : r.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST(Validate, BaselineIsValid) {
    const auto r = validate(ModelParams{}, IntensitySpec::constant(1.0), MoralHazard{});
    EXPECT_TRUE(r.ok());
}

TEST(Validate, CollectsEveryViolation) {
    ModelParams p;
    p.gamma_p = -1.0;
    p.kappa = 0.0;
    p.horizon = std::numeric_limits<double>::quiet_NaN();
    const auto r = validate(p, IntensitySpec::constant(-0.5), FirstBest{});
    EXPECT_TRUE(mentions(r, "gamma_p"));
    EXPECT_TRUE(mentions(r, "kappa"));
    EXPECT_TRUE(mentions(r, "horizon must be finite"));
    EXPECT_TRUE(mentions(r, "lambda"));
    EXPECT_EQ(r.violations.size(), 4u);
}

TEST(Validate, RequireValidThrowsWithViolations) {
    ModelParams p;
    p.gamma_a = 0.0;
    try {
        require_valid(p, IntensitySpec::constant(1.0), MoralHazard{});
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        ASSERT_EQ(e.violations().size(), 1u);
        EXPECT_NE(e.violations()[0].find("gamma_a"), std::string::npos);
    }
}

TEST(Validate, MoralHazardEffortBound) {
    ModelParams p;
    EXPECT_NEAR(effort_bound_threshold(p), 2.0 / 3.0, 1e-15);
    p.effort_bound = 0.6;
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::constant(1.0), MoralHazard{}), "effort_bound"));
    p.effort_bound = 0.7;
    EXPECT_TRUE(validate(p, IntensitySpec::constant(1.0), MoralHazard{}).ok());
}

TEST(Validate, FirstBestEffortBound) {
    ModelParams p;
    p.kappa = 2.0;
    p.effort_bound = 0.4;
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::constant(1.0), FirstBest{}), "1/kappa"));
    p.effort_bound = 0.5;
    EXPECT_TRUE(validate(p, IntensitySpec::constant(1.0), FirstBest{}).ok());
}

TEST(Validate, MitigationInputs) {
    ModelParams p;
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::constant(1.0), Mitigation{1.0, 0.1}), "theta"));
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::constant(1.0), Mitigation{0.5, 0.0}), "invest_cost"));
    const auto grid = IntensitySpec::grid({{0.0, 1.0}, {1.0, 1.0}});
    EXPECT_TRUE(mentions(validate(p, grid, Mitigation{0.5, 0.1}), "constant intensity"));
}

TEST(Validate, GridShape) {
    ModelParams p;
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::grid({{0.0, 1.0}, {0.5, 1.0}}), MoralHazard{}),
                         "extend to the horizon"));
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::grid({{0.1, 1.0}, {1.0, 1.0}}), MoralHazard{}),
                         "start at or before"));
    EXPECT_TRUE(mentions(
        validate(p, IntensitySpec::grid({{0.0, 1.0}, {0.6, 1.0}, {0.6, 2.0}, {1.0, 1.0}}),
                 MoralHazard{}),
        "strictly increasing"));
    EXPECT_TRUE(mentions(validate(p, IntensitySpec::grid({{0.0, -1.0}, {1.0, 1.0}}), MoralHazard{}),
                         "lambda >= 0"));
    EXPECT_THROW(IntensitySpec::grid({}), std::invalid_argument);
}

TEST(Intensity, ConstantQueries) {
    const auto s = IntensitySpec::constant(2.0);
    EXPECT_TRUE(s.is_constant());
    EXPECT_DOUBLE_EQ(s.rate(0.3), 2.0);
    EXPECT_DOUBLE_EQ(s.cumulative(0.5), 1.0);
    EXPECT_DOUBLE_EQ(s.inverse_cumulative(1.0), 0.5);
    EXPECT_TRUE(std::isinf(IntensitySpec::constant(0.0).inverse_cumulative(0.1)));
    EXPECT_TRUE(s.breakpoints().empty());
}

TEST(Intensity, StepGrid) {
    // lambda = 2 on [0.5, 1], 0 before
    const auto s = IntensitySpec::grid({{0.0, 0.0}, {0.5, 2.0}, {1.0, 2.0}}, Interp::Step);
    EXPECT_THROW(s.constant_value(), std::logic_error);
    EXPECT_DOUBLE_EQ(s.rate(0.25), 0.0);
    EXPECT_DOUBLE_EQ(s.rate(0.5), 2.0);
    EXPECT_DOUBLE_EQ(s.cumulative(0.5), 0.0);
    EXPECT_DOUBLE_EQ(s.cumulative(1.0), 1.0);
    EXPECT_DOUBLE_EQ(s.inverse_cumulative(0.5), 0.75);
    EXPECT_DOUBLE_EQ(s.inverse_cumulative(1.5), 1.25); // last value holds past the grid
}

TEST(Intensity, LinearGrid) {
    // lambda(t) = 2t, Lambda_t = t^2
    const auto s = IntensitySpec::grid({{0.0, 0.0}, {1.0, 2.0}}, Interp::Linear);
    EXPECT_DOUBLE_EQ(s.rate(0.25), 0.5);
    EXPECT_NEAR(s.cumulative(0.5), 0.25, 1e-15);
    EXPECT_NEAR(s.inverse_cumulative(0.25), 0.5, 1e-14);
    EXPECT_NEAR(s.inverse_cumulative(0.81), 0.9, 1e-14);
}

TEST(Intensity, GridStartingBeforeZeroMeasuresFromZero) {
    const auto s = IntensitySpec::grid({{-1.0, 3.0}, {2.0, 3.0}}, Interp::Step);
    EXPECT_DOUBLE_EQ(s.cumulative(0.5), 1.5);
    EXPECT_DOUBLE_EQ(s.inverse_cumulative(1.5), 0.5);
}

TEST(DefaultProbability, ExponentialCdf) {
    const auto s = IntensitySpec::constant(1.0);
    EXPECT_NEAR(default_probability(s, 1.0, 1.0), 0.6321205588285577, 1e-15);
    EXPECT_EQ(default_probability(s, 0.0, 1.0), 0.0);
    EXPECT_EQ(default_probability(IntensitySpec::constant(0.0), 1.0, 1.0), 0.0);
    EXPECT_THROW(default_probability(s, 1.5, 1.0), std::out_of_range);
    EXPECT_THROW(default_probability(s, -0.1, 1.0), std::out_of_range);
}

TEST(Variant, Names) {
    EXPECT_EQ(variant_name(FirstBest{}), "first_best");
    EXPECT_EQ(variant_name(MoralHazard{}), "moral_hazard");
    EXPECT_EQ(variant_name(Mitigation{}), "mitigation");
    EXPECT_FALSE(is_moral_hazard_family(FirstBest{}));
    EXPECT_TRUE(is_moral_hazard_family(Mitigation{}));
}
