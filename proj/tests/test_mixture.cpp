#include <gtest/gtest.h>

#include "rdimlab/mixture.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

namespace {

PLCurve bernoulli_exact_curve(double p) {
  // Dense exact points of (h(p) - h(D))^+.
  std::vector<double> e, r;
  const double dmax = std::min(p, 1 - p);
  for (int i = 1; i <= 4000; ++i) {
    const double d = dmax * i / 4000.0;
    e.push_back(d);
    r.push_back(oracle::bernoulli_rate(p, d));
  }
  e.insert(e.begin(), 1e-9);
  r.insert(r.begin(), oracle::bernoulli_rate(p, 1e-9));
  return PLCurve::create(e, r);
}

}  // namespace

TEST(PLCurve, RejectsNonConvex) {
  EXPECT_THROW(PLCurve::create({0, 1, 2}, {2, 1.9, 0}), InvalidInput);
  EXPECT_THROW(PLCurve::create({0, 1}, {0, 1}), InvalidInput);
  auto c = PLCurve::create({0, 1, 2}, {2, 1, 0.5});
  EXPECT_DOUBLE_EQ(c(0.5), 1.5);
  EXPECT_DOUBLE_EQ(c(5), 0.5);
}

TEST(PLCurve, FromSamplesTakesHull) {
  auto c = PLCurve::from_samples({0, 1, 2, 3}, {3, 1.5, 0.75 + 1e-8, 0});
  EXPECT_EQ(c.eps().size(), 3u);
  EXPECT_THROW(PLCurve::from_samples({0, 1, 2}, {2, 1.9, 0}), InvalidInput);
}

TEST(Allocate, MatchesGridOracle) {
  const std::vector<std::pair<double, double>> pairs = {{0.5, 0.1}, {0.25, 0.5}, {0.1, 0.3}};
  for (auto [p1, p2] : pairs) {
    auto c1 = bernoulli_exact_curve(p1), c2 = bernoulli_exact_curve(p2);
    for (double w : {0.3, 0.5}) {
      for (double eps : {0.05, 0.1, 0.2}) {
        auto a = allocate({c1, c2}, {w, 1 - w}, eps);
        auto r1 = [&](double d) { return oracle::bernoulli_rate(p1, d); };
        auto r2 = [&](double d) { return oracle::bernoulli_rate(p2, d); };
        const double grid = oracle::allocation_grid(r1, r2, w, eps, 1e-5, 0.5);
        EXPECT_NEAR(a.value, grid, 1e-4) << p1 << " " << p2 << " " << w << " " << eps;
        EXPECT_LE(a.budget_used, eps + 1e-15);
      }
    }
  }
}

TEST(Allocate, IdenticalComponentsSplitEvenly) {
  auto c = bernoulli_exact_curve(0.5);
  auto a = allocate({c, c}, {0.5, 0.5}, 0.1);
  EXPECT_NEAR(a.eps[0], a.eps[1], 1e-12);
  EXPECT_NEAR(a.value, oracle::bernoulli_rate(0.5, 0.1), 1e-5);
}

TEST(Allocate, RejectsBadWeights) {
  auto c = bernoulli_exact_curve(0.5);
  EXPECT_THROW(allocate({c, c}, {0.5, 0.4}, 0.1), InvalidInput);
  EXPECT_THROW(allocate({c}, {1.0}, 0.0), InvalidInput);
}

TEST(SampledCurve, MatchesClosedForm) {
  auto c = sampled_curve(ShiftSystem::bernoulli(0.25), 1);
  for (double d : {0.01, 0.05, 0.1, 0.2})
    EXPECT_NEAR(c(d), oracle::bernoulli_rate(0.25, d), 1e-4);
  auto c2 = sampled_curve(ShiftSystem::bernoulli(0.25), 2);
  for (double d : {0.05, 0.1}) EXPECT_NEAR(c2(d), oracle::bernoulli_rate(0.25, d), 1e-4);
}

TEST(MeasureMixture, Validation) {
  auto b = ShiftSystem::bernoulli(0.5);
  EXPECT_THROW(MeasureMixture::create({0.5, 0.4}, {b, b}), InvalidInput);
  EXPECT_THROW(MeasureMixture::create({1.0}, {b, b}), InvalidInput);
  EXPECT_NO_THROW(MeasureMixture::create({0.5, 0.5}, {b, b}));
}

TEST(MixtureFormula, SandwichBernoulliPair) {
  auto mix = MeasureMixture::create({0.5, 0.5}, {ShiftSystem::bernoulli(0.5), ShiftSystem::bernoulli(0.1)});
  for (double eps : {0.05, 0.1}) {
    auto rep = mixture_formula_check(mix, eps, {1, 2, 3});
    EXPECT_TRUE(rep.ok);
    auto r1 = [](double d) { return oracle::bernoulli_rate(0.5, d); };
    auto r2 = [](double d) { return oracle::bernoulli_rate(0.1, d); };
    EXPECT_NEAR(rep.allocation.value, oracle::allocation_grid(r1, r2, 0.5, eps, 1e-5, 0.5), 1e-3);
  }
}

TEST(Decomposition, BernoulliComponentsHaveZeroDimension) {
  auto mix = MeasureMixture::create({0.5, 0.5}, {ShiftSystem::bernoulli(0.5), ShiftSystem::bernoulli(0.2)});
  auto rep = decomposition_experiment(mix, {2, 3, 4, 5, 6, 7, 8});
  EXPECT_TRUE(rep.upper_ok);
  EXPECT_TRUE(rep.lower_ok);
  EXPECT_EQ(rep.mixture_rate.size(), 7u);
}
