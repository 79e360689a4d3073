#include <gtest/gtest.h>

#include "rdimlab/information.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

TEST(Information, Entropy) {
  EXPECT_NEAR(shannon_entropy(Distribution::uniform(2)), 1.0, 1e-15);
  EXPECT_NEAR(shannon_entropy(Distribution::point_mass(3, 1)), 0.0, 1e-15);
  EXPECT_NEAR(shannon_entropy(Distribution::create({0.25, 0.75})), 0.811278, 1e-6);
}

TEST(Information, MutualInformation) {
  auto prod = JointDistribution::create({2, 3}, {0.1, 0.2, 0.1, 0.15, 0.3, 0.15});
  EXPECT_NEAR(mutual_information(prod), 0.0, 1e-12);
  EXPECT_NEAR(mutual_information(JointDistribution::create({2, 2}, {0.5, 0, 0, 0.5})), 1.0, 1e-12);
  EXPECT_NEAR(mutual_information(JointDistribution::create({2, 2}, {0.4, 0.1, 0.1, 0.4})), 0.278072, 1e-6);
}

TEST(Information, ConditionalMutualInformation) {
  // Z independent of (X,Y).
  std::vector<double> p;
  const double xy[4] = {0.4, 0.1, 0.1, 0.4};
  for (double v : xy)
    for (double z : {0.3, 0.7}) p.push_back(v * z);
  auto t = JointDistribution::create({2, 2, 2}, p);
  EXPECT_NEAR(conditional_mutual_information(t), 0.278072, 1e-6);

  // Chain rule on random joints: I(X;(Y,Z)) = I(X;Z) + I(X;Y|Z).
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto j = JointDistribution::create({2, 2, 2}, rng.simplex(8));
    const double lhs = mutual_information(j.split(0));
    const double rhs = mutual_information(j.pair_marginal(0, 2)) + conditional_mutual_information(j);
    EXPECT_NEAR(lhs, rhs, 1e-10);
  }
}

TEST(Information, MarkovTriples) {
  auto a = sample_markov_triple(0, {2, 2, 2});
  auto b = sample_markov_triple(0, {2, 2, 2});
  EXPECT_TRUE(std::equal(a.probs().begin(), a.probs().end(), b.probs().begin()));
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto t = sample_markov_triple(seed, {2 + seed % 3, 2 + seed % 2, 3});
    // I(X;Z|Y): reorder to (X, Z, Y).
    std::vector<double> p;
    const auto& s = t.shape();
    for (std::size_t x = 0; x < s[0]; ++x)
      for (std::size_t z = 0; z < s[2]; ++z)
        for (std::size_t y = 0; y < s[1]; ++y) p.push_back(t.at(x, y, z));
    EXPECT_LE(conditional_mutual_information(JointDistribution::create({s[0], s[2], s[1]}, p)), 1e-12);
    EXPECT_LE(mutual_information(t.pair_marginal(0, 2)), mutual_information(t.pair_marginal(0, 1)) + 1e-10);
  }
}

TEST(Information, VariationalBound) {
  auto mu = Distribution::uniform(2);
  auto rho = Matrix::from_rows({{0, 1}, {1, 0}});
  std::vector<double> ones{1.0, 1.0};
  EXPECT_NEAR(variational_mi_lower_bound(mu, rho, ones, 0.0, 0.1), 0.0, 1e-15);
  EXPECT_NEAR(variational_mi_lower_bound(mu, rho, ones, 2.0, 0.1), -0.2, 1e-15);
  std::vector<double> big{2.0, 2.0};
  EXPECT_THROW(variational_mi_lower_bound(mu, rho, big, 0.0, 0.1), InvalidInput);

  // Best member of the exponential family lambda = 2 / (1 + 2^{-a}).
  double best = -1e9;
  for (double a = 0.0; a <= 10.0; a += 1e-4) {
    const double lam = 2.0 / (1.0 + std::exp2(-a));
    std::vector<double> w{lam, lam};
    best = std::max(best, variational_mi_lower_bound(mu, rho, w, a, 0.1));
  }
  EXPECT_NEAR(best, 1.0 - oracle::h2(0.1), 1e-3);
  const double ba = rate_at_distortion(mu, rho, 0.1).rate;
  EXPECT_LE(best, ba + 1e-9);
}
