#include <gtest/gtest.h>

#include "rdimlab/certificates.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

namespace {

const GapSchedule kSchedule{{2, 12, 240}, {5, 50, 2200}};

ShiftSystem toy_cluster() {
  return ShiftSystem::iid(FiniteMetricSpace::uniform_cluster(4, 1.0), Distribution::uniform(4), "toy");
}

}  // namespace

TEST(Certificate, ConstantK) {
  EXPECT_NEAR(gap_series_constant(), oracle::gap_series_constant(), 1e-15);
  EXPECT_NEAR(gap_series_constant(), 3.281494148, 1e-9);
}

TEST(Certificate, TrivialHasZeroMargin) {
  auto sys = ShiftSystem::bernoulli(0.3);
  auto c = trivial_certificate();
  for (auto mode : {FeasibilityMode::kClosedForm, FeasibilityMode::kExhaustive}) {
    auto r = check_feasibility(c, sys, mode);
    EXPECT_NEAR(r.margin, 0.0, 1e-15);
    EXPECT_TRUE(r.feasible);
  }
  EXPECT_EQ(certified_lower_bound(verify_certificate(c, sys, FeasibilityMode::kExhaustive), 0.1), 0.0);
}

TEST(Certificate, UnverifiedIsRejected) {
  EXPECT_THROW(certified_lower_bound(cluster_certificate(1, 2), 0.1), InvalidInput);
}

TEST(Certificate, ToyClusterClosedFormMatchesExhaustive) {
  auto sys = toy_cluster();
  auto c = cluster_certificate(1, 2);
  auto cf = check_feasibility(c, sys, FeasibilityMode::kClosedForm);
  auto ex = check_feasibility(c, sys, FeasibilityMode::kExhaustive);
  // lambda = 2, beta = 4: letter candidate (1/4)(1 + 3/16) * 2.
  EXPECT_NEAR(cf.integral, 0.59375, 1e-15);
  EXPECT_NEAR(cf.integral, ex.integral, 1e-12);
  EXPECT_NEAR(*cf.symbolic_bound, 1.0, 1e-15);
  EXPECT_TRUE(cf.feasible && ex.feasible);
  // Symbolic cluster alphabet of the same shape.
  auto sym = ShiftSystem::create(ClusterAlphabet{2, 1.0}, UniformModel{});
  EXPECT_NEAR(check_feasibility(c, sym, FeasibilityMode::kExhaustive).integral, cf.integral, 1e-12);
  EXPECT_NEAR(check_feasibility(c, sym, FeasibilityMode::kClosedForm).integral, cf.integral, 1e-12);
}

TEST(Certificate, RelabelingInvariance) {
  // Same cluster with rows permuted and labels shuffled.
  auto base = FiniteMetricSpace::uniform_cluster(8, 0.5);
  std::vector<std::string> labels = {"h", "c", "a", "f", "b", "g", "e", "d"};
  auto perm = FiniteMetricSpace::create(labels, base.distances());
  auto c = cluster_certificate(2, 3);
  auto r1 = check_feasibility(c, ShiftSystem::iid(base, Distribution::uniform(8)), FeasibilityMode::kExhaustive);
  auto r2 = check_feasibility(c, ShiftSystem::iid(perm, Distribution::uniform(8)), FeasibilityMode::kExhaustive);
  EXPECT_DOUBLE_EQ(r1.integral, r2.integral);
}

TEST(Certificate, InfeasibleRejected) {
  auto sys = toy_cluster();
  auto c = cluster_certificate(1, 2);
  c.log2_lambda = {2.0};  // lambda = 4 breaks the letter candidate
  auto r = check_feasibility(c, sys, FeasibilityMode::kExhaustive);
  EXPECT_GT(r.margin, 0.0);
  EXPECT_FALSE(r.feasible);
  EXPECT_THROW(verify_certificate(c, sys, FeasibilityMode::kClosedForm), CertificateRejected);
}

TEST(Certificate, ClusterBoundIsSound) {
  auto sys = toy_cluster();
  for (int L : {1, 2}) {
    auto c = verify_certificate(cluster_certificate(1, 2, L), sys, FeasibilityMode::kClosedForm);
    for (double eps : {0.02, 0.05, 0.1, 0.2})
      EXPECT_LE(certified_lower_bound(c, eps), r_L(sys, L, eps) + 1e-6) << L << " " << eps;
  }
  for (int m : {1, 2, 3}) {
    const int g = 8 * m;
    auto big = ShiftSystem::create(ClusterAlphabet{g, 1.0 / m}, UniformModel{});
    auto c = verify_certificate(cluster_certificate(m, g), big, FeasibilityMode::kClosedForm);
    EXPECT_NEAR(certified_lower_bound(c, 1.0 / g), g - 4 * m - 1, 1e-12);
    for (double eps : {1e-4, 1e-3, 0.01, 1.0 / g})
      EXPECT_LE(certified_lower_bound(c, eps), r_L(big, 1, eps) + 1e-6) << m << " " << eps;
    auto mc = check_feasibility(c, big, FeasibilityMode::kMonteCarlo, {20000, 4, 7, 3.0});
    EXPECT_TRUE(mc.feasible);
  }
}

TEST(Certificate, ExponentialGrowthValues) {
  auto c1 = cluster_certificate(1, 3), c2 = cluster_certificate(2, 9);
  auto s1 = ShiftSystem::create(ClusterAlphabet{3, 1.0}, UniformModel{});
  auto s2 = ShiftSystem::create(ClusterAlphabet{9, 0.5}, UniformModel{});
  c1 = verify_certificate(c1, s1, FeasibilityMode::kClosedForm);
  c2 = verify_certificate(c2, s2, FeasibilityMode::kClosedForm);
  EXPECT_DOUBLE_EQ(certified_lower_bound(c1, 1.0 / 3), -2.0);
  EXPECT_DOUBLE_EQ(certified_lower_bound(c2, 1.0 / 9), 0.0);
}

TEST(Certificate, GappedStageTwo) {
  GappedAlphabet g{kSchedule, 26};
  auto sys = ShiftSystem::create(g, UniformModel{});
  auto c = gapped_certificate(g, 2);
  auto cf = check_feasibility(c, sys, FeasibilityMode::kClosedForm);
  EXPECT_TRUE(cf.feasible);
  EXPECT_LT(cf.integral, 1.0);
  c = verify_certificate(c, sys, FeasibilityMode::kClosedForm);
  const double eps = std::exp2(-24.0);
  const double bound = certified_lower_bound(c, eps);
  EXPECT_NEAR(bound, 24 - std::log2(oracle::gap_series_constant()) - 4, 1e-9);
  EXPECT_NEAR(bound / 24, 0.762, 1e-3);
  EXPECT_LE(bound, r_L(sys, 1, eps) + 1e-6);
  auto mc = check_feasibility(c, sys, FeasibilityMode::kMonteCarlo, {100000, 3, 11, 3.0});
  EXPECT_TRUE(mc.feasible);
  EXPECT_LE(mc.integral, cf.integral + 1e-9 + 3 * mc.std_error);
  EXPECT_THROW(gapped_certificate(g, 3), InvalidInput);
}

TEST(Certificate, GappedExhaustiveBelowSeries) {
  GappedAlphabet g{GapSchedule{{2, 12}, {5, 50}}, 6};
  auto sys = ShiftSystem::create(g, UniformModel{});
  auto c = gapped_certificate(g, 1);
  auto cf = check_feasibility(c, sys, FeasibilityMode::kClosedForm);
  auto ex = check_feasibility(c, sys, FeasibilityMode::kExhaustive);
  EXPECT_LE(ex.integral, cf.integral + 1e-12);
  EXPECT_TRUE(ex.feasible);
}

TEST(Certificate, PerLetterLambdaNearestBound) {
  // Exponential-family witness for Bernoulli(0.2): lambda(v) = 1 / sum_w q(w) 2^{-s d(v,w)}
  // at slope s on the halved kernel.
  const double p = 0.2, d = 0.05;
  const double s = std::log2((1 - d) / d);
  const double q1 = (p - d) / (1 - 2 * d);
  std::vector<double> ll;
  for (int v = 0; v < 2; ++v) {
    const double qv = v == 1 ? q1 : 1 - q1;
    ll.push_back(-std::log2(qv + (1 - qv) * std::exp2(-s)));
  }
  auto sys = ShiftSystem::bernoulli(p);
  auto c = generic_certificate(2 * s, ll);  // the halving in beta gives slope s on letters
  auto ex = check_feasibility(c, sys, FeasibilityMode::kExhaustive);
  EXPECT_TRUE(ex.feasible) << ex.margin;
  c = verify_certificate(c, sys, FeasibilityMode::kExhaustive);
  EXPECT_LE(certified_lower_bound(c, d), oracle::bernoulli_rate(p, d) + 1e-6);
}

TEST(MixtureDual, MatchesBruteForceOverSlopes) {
  std::vector<LowerBoundCertificate> certs;
  std::vector<double> w = {4.0 / 7, 2.0 / 7, 1.0 / 7};
  for (int m = 1; m <= 3; ++m) {
    auto sys = ShiftSystem::create(ClusterAlphabet{8 * m, 1.0 / m}, UniformModel{});
    certs.push_back(verify_certificate(cluster_certificate(m, 8 * m), sys, FeasibilityMode::kClosedForm));
  }
  double prev = -1;
  for (int n = 1; n <= 3; ++n) {
    const double eps = std::pow(6.0, -n);
    double brute = 0;
    for (double s = 0; s <= 400; s += 0.01) {
      double v = -s * eps;
      for (int m = 0; m < 3; ++m) {
        const double c = 8.0 * (m + 1) - 1, a = 32.0 * (m + 1) * (m + 1);
        v += w[m] * c * std::min(1.0, s / a);
      }
      brute = std::max(brute, v);
    }
    const double dual = mixture_dual_bound(w, certs, eps);
    EXPECT_NEAR(dual, brute, 1e-6);
    EXPECT_GT(dual, prev);
    prev = dual;
  }
}
