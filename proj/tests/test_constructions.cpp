#include <gtest/gtest.h>

#include "rdimlab/constructions.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

TEST(Section4, ExponentialGrowthThresholdValues) {
  auto rep = section4_report(exponential_growth(2), 1, false, false);
  ASSERT_EQ(rep.components.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.components[0].bound_at_threshold, 3 - 4 - 1);
  EXPECT_DOUBLE_EQ(rep.components[1].bound_at_threshold, 9 - 8 - 1);
  for (const auto& c : rep.components) EXPECT_TRUE(c.feasibility.feasible);
}

TEST(Section4, LinearGrowthIncreasing) {
  auto rep = section4_report(linear_growth(3));
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_TRUE(rep.increasing);
  EXPECT_TRUE(rep.sound);
  EXPECT_NEAR(rep.rows[0].dual_bound, -32.0 / 6 + 4 + 2.0 / 7 * 15 * 32 / 128 + 1.0 / 7 * 23 * 32 / 288, 1e-9);
  EXPECT_NEAR(rep.rows[1].component_bound, 2.0 / 7 * 15 - 128.0 / 36, 1e-12);
  EXPECT_LE(rep.max_component_rdim, 0.1);
  EXPECT_EQ(rep.components[1].bound_at_threshold, 16 - 8 - 1);
}

TEST(Section4, RejectsBadParams) {
  Section4Params p{{3, 2}, {0.5, 0.5}};
  EXPECT_THROW(section4_report(p), InvalidInput);
  p = {{2, 3}, {0.5, 0.4}};
  EXPECT_THROW(build_section4_mixture(p), InvalidInput);
}

TEST(Section5, ScheduleValidation) {
  EXPECT_NO_THROW(default_schedule().validate());
  EXPECT_NO_THROW(default_schedule().validate(true));
  Section5Schedule bad{{2, 12}, {5, 40}, 26, 2};
  EXPECT_THROW(bad.validate(), InvalidInput);
  Section5Schedule close{{2, 12, 150}, {5, 50, 2200}, 26, 2};
  EXPECT_NO_THROW(close.validate());
  EXPECT_THROW(close.validate(true), InvalidInput);  // 150 <= 4 * 50
  Section5Schedule short_n{{2, 12, 240}, {5, 50, 2200}, 20, 2};
  EXPECT_THROW(short_n.validate(), InvalidInput);
}

TEST(Section5, DefaultScheduleReport) {
  auto rep = section5_report(default_schedule(), MonteCarloOptions{50000, 3, 7, 3.0});
  ASSERT_EQ(rep.windows.size(), 2u);
  for (const auto& w : rep.windows) EXPECT_TRUE(w.ok) << w.k << " " << w.max_ratio;
  for (const auto& [t, n] : rep.cylinder_depth) EXPECT_EQ(n, oracle::gap_cover_log2(default_schedule().a, 26, t)) << t;
  ASSERT_EQ(rep.points.size(), 2u);
  EXPECT_NEAR(rep.points[1].slope, (24 - std::log2(oracle::gap_series_constant()) - 4) / 24, 1e-12);
  EXPECT_TRUE(rep.points[1].closed_form.feasible);
  EXPECT_TRUE(rep.points[1].monte_carlo->feasible);
}

TEST(Interleaved, SchedulesAndSlopes) {
  auto [s1, s2] = interleaved_schedules(default_schedule());
  EXPECT_EQ(s2.a, (std::vector<std::int64_t>{5, 50, 2200}));
  EXPECT_EQ(s2.b, (std::vector<std::int64_t>{12, 240}));
  EXPECT_EQ(s2.bits, 102);
  auto rep = interleaved_report(default_schedule());
  EXPECT_GE(rep.first_max_slope, 0.75);
  EXPECT_GE(rep.second_max_slope, 0.75);
  EXPECT_LE(rep.mixture.mixture.upper, 0.6);
}

TEST(Discontinuity, PeriodicRatesVanish) {
  auto rep = discontinuity_report(4, {1, 2}, {1, 2, 3}, 0.05);
  EXPECT_TRUE(rep.ok);
  for (double w : rep.marginal_distance) EXPECT_NEAR(w, 0.0, 1e-12);
  EXPECT_NEAR(rep.certified, 1 - 32 * 0.05, 1e-12);
}
