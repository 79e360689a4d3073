#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rdimlab/core.hpp"
#include "rdimlab/metricspace.hpp"

// Shannon information measures in bits, with 0 log 0 = 0.
namespace rdimlab {

inline double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) h -= xlog2x(p);
  return std::max(0.0, h);
}

inline double shannon_entropy(const Distribution& p) { return entropy_bits(p.probs()); }

// I(X;Y) = H(X) + H(Y) - H(X,Y) for a two-axis joint.
inline double mutual_information(const JointDistribution& j) {
  require(j.axes() == 2, "mutual_information needs a two-axis joint");
  const double i = shannon_entropy(j.marginal(0)) + shannon_entropy(j.marginal(1)) - entropy_bits(j.probs());
  return std::max(0.0, i);
}

// I(mu, nu) for a source mu and a channel nu(y|x), evaluated on the support
// of mu so that rows of unreachable inputs never matter.
inline double mutual_information(const Distribution& source, const Matrix& channel) {
  require(channel.rows() == source.size(), "channel rows must match source size");
  std::vector<double> out(channel.cols(), 0.0);
  for (std::size_t x = 0; x < channel.rows(); ++x)
    for (std::size_t y = 0; y < channel.cols(); ++y) out[y] += source[x] * channel(x, y);
  double i = 0.0;
  for (std::size_t x = 0; x < channel.rows(); ++x) {
    if (source[x] <= 0.0) continue;
    for (std::size_t y = 0; y < channel.cols(); ++y) {
      const double q = channel(x, y);
      if (q > 0.0 && out[y] > 0.0) i += source[x] * q * std::log2(q / out[y]);
    }
  }
  return std::max(0.0, i);
}

// I(X;Y|Z) for a joint over X x Y x Z: sum_z P(z) I(X;Y | Z=z).
// Slices with P(z) = 0 contribute nothing.
inline double conditional_mutual_information(const JointDistribution& t) {
  require(t.axes() == 3, "conditional_mutual_information needs a three-axis joint");
  const auto& s = t.shape();
  double total = 0.0;
  for (std::size_t z = 0; z < s[2]; ++z) {
    double pz = 0.0;
    for (std::size_t x = 0; x < s[0]; ++x)
      for (std::size_t y = 0; y < s[1]; ++y) pz += t.at(x, y, z);
    if (pz <= 0.0) continue;
    std::vector<double> slice(s[0] * s[1]);
    for (std::size_t x = 0; x < s[0]; ++x)
      for (std::size_t y = 0; y < s[1]; ++y) slice[x * s[1] + y] = t.at(x, y, z) / pz;
    double mass = 0.0;
    for (double v : slice) mass += v;
    for (double& v : slice) v /= mass;
    total += pz * mutual_information(JointDistribution::create({s[0], s[1]}, std::move(slice)));
  }
  return std::max(0.0, total);
}

// Joint P(x) P(y|x) P(z|y) drawn from the seed; every row is a uniform
// point of the simplex.
inline JointDistribution sample_markov_triple(std::uint64_t seed, std::array<std::size_t, 3> sizes) {
  for (std::size_t s : sizes) require(s >= 1, "Markov triple sizes must be >= 1");
  Rng rng(seed);
  const auto px = rng.simplex(sizes[0]);
  std::vector<std::vector<double>> py(sizes[0]), pz(sizes[1]);
  for (auto& row : py) row = rng.simplex(sizes[1]);
  for (auto& row : pz) row = rng.simplex(sizes[2]);
  std::vector<double> probs(sizes[0] * sizes[1] * sizes[2]);
  double total = 0.0;
  for (std::size_t x = 0; x < sizes[0]; ++x)
    for (std::size_t y = 0; y < sizes[1]; ++y)
      for (std::size_t z = 0; z < sizes[2]; ++z)
        total += probs[(x * sizes[1] + y) * sizes[2] + z] = px[x] * py[x][y] * pz[y][z];
  for (double& p : probs) p /= total;
  return JointDistribution::create({sizes[0], sizes[1], sizes[2]}, std::move(probs));
}

// Lower bound on I(X;Y) over channels with E rho(X,Y) < eps, given a witness
// lambda with sum_x lambda(x) 2^{-a rho(x,y)} mu(x) <= 1 for every y.
inline double variational_mi_lower_bound(const Distribution& mu, const Matrix& rho,
                                         std::span<const double> lambda, double a, double eps) {
  require(a >= 0.0, "slope a must be nonnegative");
  require(eps > 0.0, "eps must be positive");
  require(rho.rows() == mu.size() && lambda.size() == mu.size(), "witness/distortion sizes must match the source");
  for (std::size_t y = 0; y < rho.cols(); ++y) {
    double integral = 0.0;
    for (std::size_t x = 0; x < mu.size(); ++x) integral += lambda[x] * std::exp2(-a * rho(x, y)) * mu[x];
    if (integral > 1.0 + 1e-12)
      throw InvalidInput("infeasible witness at y=" + std::to_string(y) + ", margin " + format_g9(integral - 1.0));
  }
  double expected_log = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) {
    if (mu[x] <= 0.0) continue;
    require(lambda[x] > 0.0, "witness must be positive on the support of mu");
    expected_log += mu[x] * std::log2(lambda[x]);
  }
  return -a * eps + expected_log;
}

}  // namespace rdimlab
