#include <gtest/gtest.h>

#include "rdimlab/dimension.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

namespace {
const GapSchedule kSchedule{{2, 12, 240}, {5, 50, 2200}};
}

TEST(Covering, SmallCases) {
  auto s = FiniteMetricSpace::uniform_cluster(3, 1.0);
  EXPECT_EQ(covering_number(s, 0.5).value(), 3u);
  EXPECT_EQ(covering_number(s, 1.5).value(), 1u);
  // Ties at exactly eps are excluded.
  EXPECT_EQ(covering_number(s, 1.0).value(), 3u);
}

TEST(Covering, BranchAndBoundMatchesSubsetDp) {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 9;
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(), y[i] = rng.uniform();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::hypot(x[i] - x[j], y[i] - y[j]);
    auto s = new_space(FiniteMetricSpace::default_labels(n), d);
    for (double eps : {0.15, 0.3, 0.5}) {
      auto c = covering_number(s, eps);
      ASSERT_TRUE(c.exact());
      EXPECT_EQ(static_cast<int>(c.value()), oracle::cover_by_subset_dp(d, eps)) << n << " " << eps;
    }
  }
}

TEST(Covering, MonotoneAndDisjointUnion) {
  auto line = FiniteMetricSpace::line_grid(9, 0.125);
  std::size_t prev = 1000;
  for (double eps = 0.05; eps < 1.2; eps += 0.05) {
    const std::size_t c = covering_number(line, eps).value();
    EXPECT_LE(c, prev);
    prev = c;
  }
  // Two far-apart copies of a 4-point grid: covers add.
  std::vector<std::vector<double>> d(8, std::vector<double>(8));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      d[i][j] = (i / 4 == j / 4) ? std::abs(double(i % 4) - double(j % 4)) * 0.25 : 5.0;
  auto u = new_space(FiniteMetricSpace::default_labels(8), d);
  auto part = FiniteMetricSpace::line_grid(4, 0.25);
  for (double eps : {0.2, 0.3, 0.6})
    EXPECT_EQ(covering_number(u, eps).value(), 2 * covering_number(part, eps).value());
}

TEST(Covering, GappedAlphabetFormula) {
  GappedAlphabet g{kSchedule, 10};
  auto s = g.materialize();
  ASSERT_TRUE(s.is_ultrametric());
  for (int t = 0; t <= 30; ++t) {
    const double eps = std::exp2(-t);
    const std::size_t expected = std::size_t{1} << oracle::gap_cover_log2(kSchedule.a, 10, t);
    EXPECT_EQ(ultrametric_cover(s, eps), expected) << t;
    EXPECT_EQ(covering_number_branch_and_bound(s, eps).value(), expected) << t;
    EXPECT_EQ(std::exp2(g.log2_covering(eps)), static_cast<double>(expected));
  }
}

TEST(Schedule, ScaleFunction) {
  EXPECT_EQ(kSchedule.h(3), 12);
  EXPECT_EQ(kSchedule.h(20), 20);
  EXPECT_EQ(kSchedule.h(25), 240);
  for (std::int64_t n = 1; n < 1000; ++n) EXPECT_EQ(kSchedule.h(n), oracle::gap_h(kSchedule.a, n)) << n;
}

TEST(EntropyAtScale, FullShiftDiscreteMetric) {
  auto sys = ShiftSystem::iid(FiniteMetricSpace::uniform_cluster(4, 1.0), Distribution::uniform(4));
  EXPECT_NEAR(entropy_at_scale(sys, 0.3).value, 2.0, 1e-12);
  EXPECT_EQ(entropy_at_scale(sys, 1.5).value, 0.0);
  // Direct cover count of the length-L words under the sup metric.
  for (int L = 1; L <= 3; ++L) {
    std::vector<std::vector<std::size_t>> words;
    const std::size_t n = std::size_t{1} << (2 * L);
    for (std::size_t w = 0; w < n; ++w) {
      std::vector<std::size_t> word;
      for (int k = 0; k < L; ++k) word.push_back((w >> (2 * k)) & 3);
      words.push_back(word);
    }
    auto c = detail::word_cover(sys.space(), words, 0.3);
    EXPECT_NEAR(std::log2(static_cast<double>(c.value())) / L, 2.0, 1e-12);
  }
}

TEST(EntropyAtScale, SubshiftExtrapolation) {
  auto per = ShiftSystem::create(FiniteMetricSpace::uniform_cluster(3, 1.0), PeriodicModel{{0, 1, 2}});
  auto e = entropy_at_scale(per, 0.5, 5);
  EXPECT_FALSE(e.closed_form);
  EXPECT_LE(e.value, std::log2(3.0) / 5 + 1e-12);
}

TEST(EntropyAtScale, GappedShift) {
  auto sys = ShiftSystem::create(GappedAlphabet{kSchedule, 26}, UniformModel{});
  EXPECT_EQ(entropy_at_scale(sys, std::exp2(-24)).value, 24.0);
  EXPECT_EQ(entropy_at_scale(sys, std::exp2(-30)).value, 24.0);
  std::vector<double> t;
  for (int i = 1; i <= 24; ++i) t.push_back(i);
  auto m = metric_mean_dim_upper(sys, t);
  EXPECT_NEAR(m.upper, 1.0, 0.05);
}

TEST(EntropyAtScale, RateBelowEntropy) {
  std::vector<ShiftSystem> systems{ShiftSystem::bernoulli(0.3),
                                   ShiftSystem::iid(FiniteMetricSpace::line_grid(4, 1.0 / 3), Distribution::create({0.1, 0.2, 0.3, 0.4}))};
  for (const auto& sys : systems)
    for (double eps : {0.05, 0.2, 0.4}) EXPECT_LE(r_L(sys, 2, eps), entropy_at_scale(sys, eps).value + 1e-6);
}

TEST(Dimension, MmdimOfFiniteFullShiftIsSmall) {
  auto sys = ShiftSystem::iid(FiniteMetricSpace::uniform_cluster(4, 1.0), Distribution::uniform(4));
  std::vector<double> t;
  for (int i = 20; i <= 40; ++i) t.push_back(i);
  EXPECT_LE(metric_mean_dim_upper(sys, t).upper, 0.1);
  EXPECT_THROW(metric_mean_dim_upper(sys, {1, 2}), InvalidInput);
}

TEST(Dimension, RdimEstimates) {
  RDCurve zero;
  for (int t = 1; t <= 6; ++t) zero.samples.push_back({std::exp2(-t), 0.0, 1, {}});
  auto z = rdim_estimates(zero, 0.5);
  EXPECT_EQ(z.upper, 0.0);
  EXPECT_EQ(z.lower, 0.0);

  auto curve = rd_curve(ShiftSystem::bernoulli(0.5), dyadic_grid(4, 12), {1});
  // R <= 1 bit, so R / t <= 0.1 on the tail t = 10..12.
  auto e = rdim_estimates(curve, 1.0 / 3);
  EXPECT_LE(e.upper, 0.1);
  EXPECT_GE(e.lower, 0.0);
  EXPECT_THROW(rdim_estimates(RDCurve{}), InvalidInput);
}
