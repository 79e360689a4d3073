#include <gtest/gtest.h>

#include "rdimlab/ratedistortion.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

namespace {
const Matrix kHamming = Matrix::from_rows({{0, 1}, {1, 0}});
}

TEST(BlahutArimoto, ZeroSlope) {
  auto r = blahut_arimoto_slope(Distribution::create({0.3, 0.7}), kHamming, 0.0);
  EXPECT_EQ(r.rate, 0.0);
  EXPECT_NEAR(r.distortion, 0.3, 1e-15);
}

TEST(BlahutArimoto, LosslessLimit) {
  auto r = blahut_arimoto_slope(Distribution::uniform(2), kHamming, 1e3);
  EXPECT_LT(r.distortion, 1e-12);
  EXPECT_NEAR(r.rate, 1.0, 1e-9);
}

TEST(BlahutArimoto, RejectsBadInput) {
  EXPECT_THROW(blahut_arimoto_slope(Distribution::uniform(2), kHamming, -1.0), InvalidInput);
  EXPECT_THROW(rate_at_distortion(Distribution::uniform(2), kHamming, 0.0), InvalidInput);
}

TEST(RateAtDistortion, BernoulliClosedForm) {
  EXPECT_EQ(rate_at_distortion(Distribution::bernoulli(0.5), kHamming, 0.5).rate, 0.0);
  EXPECT_NEAR(rate_at_distortion(Distribution::bernoulli(0.25), kHamming, 0.05).rate, 0.5248812, 1e-6);
  EXPECT_NEAR(rate_at_distortion(Distribution::bernoulli(0.5), kHamming, 0.1).rate, 0.531004, 1e-6);
  for (double p : {0.25, 0.5})
    for (double d : {0.01, 0.05, 0.1, 0.2, 0.3, 0.45})
      EXPECT_NEAR(rate_at_distortion(Distribution::bernoulli(p), kHamming, d).rate, oracle::bernoulli_rate(p, d), 1e-6)
          << "p=" << p << " D=" << d;
}

TEST(RateAtDistortion, ClosedFormAgreesWithChannelGrid) {
  for (double p : {0.25, 0.5})
    for (double d : {0.05, 0.1, 0.2})
      EXPECT_NEAR(oracle::bernoulli_rate_grid(p, d, 1e-3), oracle::bernoulli_rate(p, d), 5e-3);
}

TEST(BlockSource, Laws) {
  auto sys = ShiftSystem::bernoulli(0.3);
  auto src = build_block_source(sys, 2);
  ASSERT_EQ(src.states(), 4u);
  EXPECT_NEAR(src.law[0], 0.49, 1e-15);
  EXPECT_NEAR(src.law[3], 0.09, 1e-15);
  EXPECT_NEAR(src.site_marginal(1)[1], 0.3, 1e-12);

  auto per = ShiftSystem::create(ShiftSystem::binary_alphabet(), PeriodicModel{{0, 1}});
  auto ps = build_block_source(per, 2);
  EXPECT_NEAR(ps.law[0b10], 0.5, 1e-15);
  EXPECT_NEAR(ps.law[0b01], 0.5, 1e-15);

  auto mix = ShiftSystem::mixture({0.5, 0.5}, {ShiftSystem::bernoulli(0.1), ShiftSystem::bernoulli(0.8)});
  auto ms = build_block_source(mix, 2);
  EXPECT_NEAR(ms.law[0], 0.5 * 0.81 + 0.5 * 0.04, 1e-15);
}

TEST(BlockSource, CapAndMarkov) {
  auto sys = ShiftSystem::iid(FiniteMetricSpace::line_grid(4, 0.25), Distribution::uniform(4));
  EXPECT_THROW(build_block_source(sys, 9), InvalidInput);
  auto p = Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  auto mk = ShiftSystem::create(ShiftSystem::binary_alphabet(), MarkovModel{p, Distribution::create({2.0 / 3, 1.0 / 3})});
  auto src = build_block_source(mk, 3);
  for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(src.site_marginal(s)[0], 2.0 / 3, 1e-12);
  EXPECT_THROW(ShiftSystem::create(ShiftSystem::binary_alphabet(), MarkovModel{p, Distribution::uniform(2)}),
               InvalidInput);
}

TEST(RL, SingleLetterisation) {
  auto sys = ShiftSystem::iid(FiniteMetricSpace::line_grid(3, 0.5), Distribution::create({0.2, 0.5, 0.3}));
  for (double eps : {0.05, 0.1, 0.2}) {
    const double r1 = r_L(sys, 1, eps);
    EXPECT_NEAR(r_L(sys, 2, eps), r1, 1e-6);
    EXPECT_NEAR(r_L(sys, 3, eps), r1, 1e-6);
  }
  EXPECT_EQ(r_L(sys, 2, 1.0), 0.0);
}

TEST(RL, SymmetricRouteMatchesBlahutArimoto) {
  ClusterAlphabet c{3, 0.5};
  auto mat = ShiftSystem::iid(c.materialize(), Distribution::uniform(8));
  auto sym = ShiftSystem::create(c, UniformModel{});
  for (double eps : {0.01, 0.1, 0.3, 0.45})
    EXPECT_NEAR(r_L(sym, 1, eps), r_L(mat, 1, eps), 1e-7) << eps;

  GappedAlphabet g{{{2, 12}, {5, 50}}, 6};
  auto gm = ShiftSystem::iid(g.materialize(), Distribution::uniform(64));
  auto gs = ShiftSystem::create(g, UniformModel{});
  for (double eps : {0.2, 0.05, 1e-3, 1e-4})
    EXPECT_NEAR(r_L(gs, 1, eps), r_L(gm, 1, eps), 1e-6) << eps;
}

TEST(RDCurve, BernoulliCurve) {
  auto sys = ShiftSystem::bernoulli(0.5);
  auto curve = rd_curve(sys, dyadic_grid(1, 6), {1, 2});
  ASSERT_EQ(curve.samples.size(), 6u);
  for (const auto& s : curve.samples) EXPECT_NEAR(s.rate, oracle::bernoulli_rate(0.5, s.eps), 1e-6);
  EXPECT_TRUE(curve_violations(curve).empty());

  auto point = ShiftSystem::iid(ShiftSystem::binary_alphabet(), Distribution::point_mass(2, 0));
  for (const auto& s : rd_curve(point, dyadic_grid(1, 4), {1, 2}).samples) EXPECT_EQ(s.rate, 0.0);
}

TEST(RDCurve, ParallelMatchesSerial) {
  auto sys = ShiftSystem::bernoulli(0.3);
  auto a = rd_curve(sys, dyadic_grid(2, 7), {1, 2}, 1);
  auto b = rd_curve(sys, dyadic_grid(2, 7), {1, 2}, 4);
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].rate, b.samples[i].rate);
}

TEST(RDCurve, ViolationsDetected) {
  RDCurve c;
  c.samples = {{0.4, 0.1, 1, {}}, {0.2, 0.05, 1, {}}, {0.1, 0.5, 1, 0.7}};
  auto bad = curve_violations(c);
  EXPECT_GE(bad.size(), 2u);
}

TEST(RL, ContinuityInSource) {
  double prev = 1e9;
  for (double delta : {0.04, 0.02, 0.01}) {
    double dev = 0.0;
    for (double eps : {0.1, 0.2}) {
      auto a = ShiftSystem::bernoulli(0.3), b = ShiftSystem::bernoulli(0.3 + delta);
      dev = std::max(dev, std::abs(r_L(a, 1, eps) - r_L(b, 1, eps)));
    }
    EXPECT_LT(dev, prev);
    prev = dev;
  }
}
