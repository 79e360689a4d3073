#include <gtest/gtest.h>

#include "rdimlab/metricspace.hpp"
#include "rdimlab_verify/oracles.hpp"

using namespace rdimlab;

namespace {

std::string construction_error(std::vector<std::vector<double>> d) {
  try {
    new_space(FiniteMetricSpace::default_labels(d.size()), d);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return {};
}

Distribution random_distribution(Rng& rng, std::size_t n) { return Distribution::create(rng.simplex(n)); }

FiniteMetricSpace random_space(Rng& rng, std::size_t n) {
  // Shortest-path closure of random weights is always a metric.
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 0.1 + rng.uniform();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return new_space(FiniteMetricSpace::default_labels(n), d);
}

}  // namespace

TEST(MetricSpace, ValidSpace) {
  auto s = new_space({"a", "b"}, {{0, 1}, {1, 0}});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s.diameter(), 1.0);
}

TEST(MetricSpace, RejectsInvalidMatrices) {
  EXPECT_NE(construction_error({{0, 1}, {2, 0}}).find("asymmetric"), std::string::npos);
  EXPECT_NE(construction_error({{0, -1}, {-1, 0}}).find("negative"), std::string::npos);
  EXPECT_NE(construction_error({{0, 0}, {0, 0}}).find("zero distance"), std::string::npos);
  EXPECT_NE(construction_error({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}).find("triangle violated at (0,1,2)"),
            std::string::npos);
}

TEST(MetricSpace, DistributionValidation) {
  EXPECT_THROW(Distribution::create({0.5, 0.4}), InvalidInput);
  EXPECT_THROW(Distribution::create({1.2, -0.2}), InvalidInput);
  EXPECT_NO_THROW(Distribution::create({0.25, 0.75}));
}

TEST(Wasserstein, TwoPointClosedForms) {
  auto s = new_space({"a", "b"}, {{0, 1}, {1, 0}});
  EXPECT_NEAR(wasserstein(s, Distribution::create({1, 0}), Distribution::create({0, 1})), 1.0, 1e-12);
  EXPECT_NEAR(wasserstein(s, Distribution::create({0.7, 0.3}), Distribution::create({0.4, 0.6})), 0.3, 1e-12);
  EXPECT_NEAR(wasserstein(s, Distribution::create({0.7, 0.3}), Distribution::create({0.7, 0.3})), 0.0, 1e-15);
}

TEST(Wasserstein, MatchesVertexEnumeration) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    auto s = random_space(rng, n);
    auto p = random_distribution(rng, n), q = random_distribution(rng, n);
    const double ref = oracle::transport_vertex_enumeration(s.distances().to_rows(),
                                                            {p.probs().begin(), p.probs().end()},
                                                            {q.probs().begin(), q.probs().end()});
    EXPECT_NEAR(wasserstein(s, p, q), ref, 1e-9);
  }
}

TEST(Wasserstein, MetricAxiomsAndScaling) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + trial % 4;
    auto s = random_space(rng, n);
    auto p = random_distribution(rng, n), q = random_distribution(rng, n), r = random_distribution(rng, n);
    const double pq = wasserstein(s, p, q), qp = wasserstein(s, q, p);
    EXPECT_GE(pq, 0.0);
    EXPECT_NEAR(pq, qp, 1e-12);
    EXPECT_NEAR(wasserstein(s, p, p), 0.0, 1e-9);
    EXPECT_LE(wasserstein(s, p, r), pq + wasserstein(s, q, r) + 1e-12);
    EXPECT_NEAR(wasserstein(s.scaled(3.5), p, q), 3.5 * pq, 1e-12 * std::max(1.0, pq));
  }
}

TEST(Wasserstein, SizeMismatch) {
  auto s = new_space({"a", "b"}, {{0, 1}, {1, 0}});
  EXPECT_THROW(wasserstein(s, Distribution::uniform(2), Distribution::uniform(3)), InvalidInput);
}
