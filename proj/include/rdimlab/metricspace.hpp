#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rdimlab/core.hpp"

namespace rdimlab {

inline constexpr double kTriangleTolerance = 1e-12;
inline constexpr double kMassTolerance = 1e-12;

// A finite metric space with a validated distance matrix. Immutable.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  // Validates symmetry, positivity off the diagonal and the triangle
  // inequality; errors name the offending indices.
  static FiniteMetricSpace create(std::vector<std::string> labels, const Matrix& dist) {
    const std::size_t n = labels.size();
    require(dist.rows() == n && dist.cols() == n,
            "distance matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
      require(std::isfinite(dist(i, i)) && dist(i, i) == 0.0,
              "nonzero diagonal at (" + std::to_string(i) + "," + std::to_string(i) + ")");
      for (std::size_t j = 0; j < n; ++j) {
        const std::string at = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        require(std::isfinite(dist(i, j)), "non-finite distance at " + at);
        require(dist(i, j) >= 0.0, "negative distance at " + at);
        require(dist(i, j) == dist(j, i), "asymmetric at " + at);
        require(i == j || dist(i, j) > 0.0, "zero distance between distinct points at " + at);
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (dist(i, k) > dist(i, j) + dist(j, k) + kTriangleTolerance)
            throw InvalidInput("triangle violated at (" + std::to_string(i) + "," +
                               std::to_string(j) + "," + std::to_string(k) + ")");
    FiniteMetricSpace s;
    s.labels_ = std::move(labels);
    s.dist_ = dist;
    return s;
  }

  static FiniteMetricSpace create(std::vector<std::string> labels,
                                  const std::vector<std::vector<double>>& dist) {
    return create(std::move(labels), Matrix::from_rows(dist));
  }

  // All distinct points at distance `spacing`.
  static FiniteMetricSpace uniform_cluster(std::size_t n, double spacing) {
    Matrix d(n, n, spacing);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
    return create(default_labels(n), d);
  }

  // n equally spaced points on a line, distance |i-j| * step.
  static FiniteMetricSpace line_grid(std::size_t n, double step) {
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d(i, j) = step * static_cast<double>(i > j ? i - j : j - i);
    return create(default_labels(n), d);
  }

  static std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return labels;
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& distances() const { return dist_; }
  double operator()(std::size_t i, std::size_t j) const { return dist_(i, j); }

  double diameter() const {
    double d = 0.0;
    for (double v : dist_.data()) d = std::max(d, v);
    return d;
  }

  double min_separation() const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) d = std::min(d, dist_(i, j));
    return d;
  }

  bool is_ultrametric(double tol = kTriangleTolerance) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (dist_(i, k) > std::max(dist_(i, j), dist_(j, k)) + tol) return false;
    return true;
  }

  FiniteMetricSpace scaled(double c) const {
    require(c > 0.0, "scale factor must be positive");
    FiniteMetricSpace s = *this;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) s.dist_(i, j) = c * dist_(i, j);
    return s;
  }

  friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;

 private:
  std::vector<std::string> labels_;
  Matrix dist_;
};

inline FiniteMetricSpace new_space(std::vector<std::string> labels,
                                   const std::vector<std::vector<double>>& dist) {
  return FiniteMetricSpace::create(std::move(labels), dist);
}

// Probability vector over the points of a finite space.
class Distribution {
 public:
  Distribution() = default;

  static Distribution create(std::vector<double> probs) {
    require(!probs.empty(), "distribution must have at least one entry");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      require(std::isfinite(probs[i]) && probs[i] >= 0.0,
              "negative or non-finite probability at index " + std::to_string(i));
      total += probs[i];
    }
    require(std::abs(total - 1.0) <= kMassTolerance,
            "probabilities sum to " + format_g9(total) + ", expected 1");
    Distribution d;
    d.probs_ = std::move(probs);
    return d;
  }

  // Renormalises an accumulated vector whose mass is already 1 up to
  // floating-point summation error.
  static Distribution from_accumulated(std::vector<double> probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    require(std::abs(total - 1.0) <= 1e-9, "accumulated mass " + format_g9(total) + " far from 1");
    for (double& p : probs) p /= total;
    return create(std::move(probs));
  }

  static Distribution uniform(std::size_t n) {
    return Distribution::create(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Distribution point_mass(std::size_t n, std::size_t at) {
    std::vector<double> p(n, 0.0);
    p.at(at) = 1.0;
    return create(std::move(p));
  }

  static Distribution bernoulli(double p1) { return create({1.0 - p1, p1}); }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  std::size_t support_size() const {
    return static_cast<std::size_t>(std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }));
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

// Joint law on a product of two or three finite sets, row-major.
class JointDistribution {
 public:
  JointDistribution() = default;

  static JointDistribution create(std::vector<std::size_t> shape, std::vector<double> probs) {
    require(shape.size() == 2 || shape.size() == 3, "joint distribution must have 2 or 3 axes");
    std::size_t n = 1;
    for (std::size_t s : shape) {
      require(s >= 1, "joint axis sizes must be positive");
      n *= s;
    }
    require(probs.size() == n, "joint probability tensor has wrong size");
    double total = 0.0;
    for (double p : probs) {
      require(std::isfinite(p) && p >= 0.0, "negative or non-finite joint probability");
      total += p;
    }
    require(std::abs(total - 1.0) <= kMassTolerance,
            "joint mass " + format_g9(total) + ", expected 1");
    JointDistribution j;
    j.shape_ = std::move(shape);
    j.probs_ = std::move(probs);
    return j;
  }

  static JointDistribution from_matrix(const Matrix& m) {
    return create({m.rows(), m.cols()}, m.data());
  }

  // Law of (X, Y) with X ~ source and Y | X=x ~ channel row x.
  static JointDistribution from_channel(const Distribution& source, const Matrix& channel) {
    require(channel.rows() == source.size(), "channel rows must match source size");
    Matrix m(channel.rows(), channel.cols());
    for (std::size_t x = 0; x < channel.rows(); ++x)
      for (std::size_t y = 0; y < channel.cols(); ++y) m(x, y) = source[x] * channel(x, y);
    std::vector<double> probs = m.data();
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& p : probs) p /= total;
    return create({m.rows(), m.cols()}, std::move(probs));
  }

  std::size_t axes() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::span<const double> probs() const { return probs_; }

  double at(std::size_t i, std::size_t j) const {
    require(axes() == 2, "at(i,j) needs a two-axis joint");
    return probs_[i * shape_[1] + j];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    require(axes() == 3, "at(i,j,k) needs a three-axis joint");
    return probs_[(i * shape_[1] + j) * shape_[2] + k];
  }

  Distribution marginal(std::size_t axis) const {
    require(axis < axes(), "marginal axis out of range");
    std::vector<double> m(shape_[axis], 0.0);
    for_each_index([&](const std::size_t* idx, double p) { m[idx[axis]] += p; });
    return Distribution::from_accumulated(std::move(m));
  }

  // Two-axis joint of the given pair of axes (three-axis joints only).
  JointDistribution pair_marginal(std::size_t a, std::size_t b) const {
    require(axes() == 3 && a < 3 && b < 3 && a != b, "pair_marginal needs two distinct axes of a 3-axis joint");
    std::vector<double> m(shape_[a] * shape_[b], 0.0);
    for_each_index([&](const std::size_t* idx, double p) { m[idx[a] * shape_[b] + idx[b]] += p; });
    double total = std::accumulate(m.begin(), m.end(), 0.0);
    for (double& v : m) v /= total;
    return create({shape_[a], shape_[b]}, std::move(m));
  }

  // Groups axes so that axis `a` stays alone and the other two are merged
  // into one, giving the two-axis joint of (X_a, (X_b, X_c)).
  JointDistribution split(std::size_t a) const {
    require(axes() == 3 && a < 3, "split needs a 3-axis joint");
    std::size_t b = (a + 1) % 3, c = (a + 2) % 3;
    if (b > c) std::swap(b, c);
    std::vector<double> m(shape_[a] * shape_[b] * shape_[c], 0.0);
    const std::size_t rest = shape_[b] * shape_[c];
    for_each_index([&](const std::size_t* idx, double p) {
      m[idx[a] * rest + idx[b] * shape_[c] + idx[c]] += p;
    });
    return create({shape_[a], rest}, std::move(m));
  }

  template <typename F>
  void for_each_index(F&& f) const {
    std::size_t idx[3] = {0, 0, 0};
    for (double p : probs_) {
      f(static_cast<const std::size_t*>(idx), p);
      for (std::size_t ax = axes(); ax-- > 0;) {
        if (++idx[ax] < shape_[ax]) break;
        idx[ax] = 0;
      }
    }
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> probs_;
};

namespace detail {

// Successive shortest paths on the complete bipartite transport network.
// Bellman-Ford handles the negative reverse arcs; spaces here are small.
inline double transport_cost(const Matrix& cost, std::span<const double> supply_in,
                             std::span<const double> demand_in) {
  constexpr double kZero = 1e-15;
  const std::size_t n = supply_in.size(), m = demand_in.size();
  std::vector<double> supply(supply_in.begin(), supply_in.end());
  std::vector<double> demand(demand_in.begin(), demand_in.end());
  Matrix flow(n, m);

  // Nodes: sources 0..n-1, sinks n..n+m-1, super sink n+m.
  const std::size_t sink = n + m;
  const std::size_t max_rounds = 4 * (n + 1) * (m + 1) + 16;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::vector<double> dist(n + m + 1, std::numeric_limits<double>::infinity());
    std::vector<std::ptrdiff_t> pred(n + m + 1, -1);
    for (std::size_t i = 0; i < n; ++i)
      if (supply[i] > kZero) dist[i] = 0.0;
    bool any_source = false;
    for (std::size_t i = 0; i < n; ++i) any_source |= supply[i] > kZero;
    if (!any_source) break;

    for (std::size_t pass = 0; pass < n + m + 1; ++pass) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(dist[i])) continue;
        for (std::size_t j = 0; j < m; ++j) {
          const double nd = dist[i] + cost(i, j);
          if (nd < dist[n + j] - 1e-15) {
            dist[n + j] = nd;
            pred[n + j] = static_cast<std::ptrdiff_t>(i);
            changed = true;
          }
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        if (!std::isfinite(dist[n + j])) continue;
        for (std::size_t i = 0; i < n; ++i) {
          if (flow(i, j) <= kZero) continue;
          const double nd = dist[n + j] - cost(i, j);
          if (nd < dist[i] - 1e-15) {
            dist[i] = nd;
            pred[i] = static_cast<std::ptrdiff_t>(n + j);
            changed = true;
          }
        }
        if (demand[j] > kZero && dist[n + j] < dist[sink] - 1e-15) {
          dist[sink] = dist[n + j];
          pred[sink] = static_cast<std::ptrdiff_t>(n + j);
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (pred[sink] < 0) break;

    // Walk back to find the bottleneck.
    double push = demand[static_cast<std::size_t>(pred[sink]) - n];
    std::size_t v = static_cast<std::size_t>(pred[sink]);
    std::size_t origin = v;
    while (true) {
      const std::ptrdiff_t p = pred[v];
      if (p < 0) {
        origin = v;
        break;
      }
      if (v >= n) {
        // forward arc i -> j, unbounded
      } else {
        push = std::min(push, flow(v, static_cast<std::size_t>(p) - n));
      }
      v = static_cast<std::size_t>(p);
    }
    push = std::min(push, supply[origin]);
    if (push <= kZero) break;

    v = static_cast<std::size_t>(pred[sink]);
    demand[v - n] -= push;
    while (pred[v] >= 0) {
      const auto p = static_cast<std::size_t>(pred[v]);
      if (v >= n)
        flow(p, v - n) += push;
      else
        flow(v, p - n) -= push;
      v = p;
    }
    supply[origin] -= push;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) total += std::max(0.0, flow(i, j)) * cost(i, j);
  return total;
}

}  // namespace detail

// Exact optimal-transport cost between p and q under the space metric.
inline double wasserstein(const FiniteMetricSpace& space, const Distribution& p, const Distribution& q) {
  require(p.size() == space.size() && q.size() == space.size(),
          "distributions must live on the given space (size " + std::to_string(space.size()) + ")");
  if (p == q) return 0.0;
  // Mass common to both marginals stays in place at zero cost.
  std::vector<double> surplus(p.size()), deficit(q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double common = std::min(p[i], q[i]);
    surplus[i] = p[i] - common;
    deficit[i] = q[i] - common;
  }
  return detail::transport_cost(space.distances(), surplus, deficit);
}

}  // namespace rdimlab
