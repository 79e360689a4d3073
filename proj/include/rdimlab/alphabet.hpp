#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rdimlab/core.hpp"
#include "rdimlab/metricspace.hpp"

namespace rdimlab {

// Distances seen from any point of a point-transitive finite metric space:
// class j holds 2^{log2_count[j]} points at distance 2^{log2_distance[j]}.
// Class 0 is the point itself (log2_distance = -inf, log2_count = 0).
struct DistanceProfile {
  std::vector<double> log2_distance;
  std::vector<double> log2_count;

  double log2_size() const { return log2_sum_exp2(log2_count); }
};

// 2^g points with every pairwise distance equal to `spacing`.
struct ClusterAlphabet {
  int log2_size = 1;
  double spacing = 1.0;

  double diameter() const { return spacing; }

  DistanceProfile profile() const {
    // log2(2^g - 1) computed without cancellation for large g.
    const double others = static_cast<double>(log2_size) + std::log2(-std::expm1(-static_cast<double>(log2_size) * std::log(2.0)));
    return {{-INFINITY, std::log2(spacing)}, {0.0, others}};
  }

  // log2 of the minimal number of sets of diameter < eps.
  double log2_covering(double eps) const { return eps > spacing ? 0.0 : static_cast<double>(log2_size); }

  FiniteMetricSpace materialize() const {
    require(log2_size <= 12, "cluster alphabet too large to materialise");
    return FiniteMetricSpace::uniform_cluster(std::size_t{1} << log2_size, spacing);
  }

  friend bool operator==(const ClusterAlphabet&, const ClusterAlphabet&) = default;
};

// Increasing naturals a_1 < b_1 < a_2 < b_2 < ... with c_k = k a_k, and the
// non-decreasing scale function h built from them.
struct GapSchedule {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;

  std::size_t stages() const { return a.size(); }
  std::int64_t c(std::size_t k) const { return static_cast<std::int64_t>(k) * a.at(k - 1); }  // 1-based k

  // h(n) = n on n <= a_1 and on every [a_k, c_k]; h(n) = a_{k+1} on
  // (c_k, a_{k+1}]. Past the last listed stage h(n) = n.
  std::int64_t h(std::int64_t n) const {
    if (a.empty() || n <= a.front()) return n;
    for (std::size_t k = 1; k <= a.size(); ++k) {
      if (n >= a[k - 1] && n <= c(k)) return n;
      if (k < a.size() && n > c(k) && n <= a[k]) return a[k];
    }
    return n;
  }

  friend bool operator==(const GapSchedule&, const GapSchedule&) = default;
};

// {0,1}^N with rho(v, w) = 2^{-h(first index where v and w differ)}; an
// ultrametric, so eps-covers are exactly the cylinder partitions.
struct GappedAlphabet {
  GapSchedule schedule;
  int bits = 1;

  double diameter() const { return std::exp2(-static_cast<double>(schedule.h(1))); }

  // log2 rho for points whose first difference is at index i (1-based).
  double log2_distance_at(int i) const { return -static_cast<double>(schedule.h(i)); }

  DistanceProfile profile() const {
    DistanceProfile p{{-INFINITY}, {0.0}};
    for (int i = 1; i <= bits; ++i) {
      p.log2_distance.push_back(log2_distance_at(i));
      p.log2_count.push_back(static_cast<double>(bits - i));
    }
    return p;
  }

  // Number of leading bits that a cover by sets of diameter < eps must fix:
  // min{n : n == N or h(n+1) > log2(1/eps)}.
  int cylinder_depth(double eps) const {
    const double log2_eps = std::log2(eps);
    for (int n = 0; n < bits; ++n)
      if (log2_distance_at(n + 1) < log2_eps) return n;
    return bits;
  }

  double log2_covering(double eps) const { return static_cast<double>(cylinder_depth(eps)); }

  // Points are indexed with bit 1 as the most significant of `bits`.
  FiniteMetricSpace materialize() const {
    require(bits <= 12, "gapped alphabet too large to materialise");
    const std::size_t n = std::size_t{1} << bits;
    Matrix d(n, n);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t w = 0; w < n; ++w) {
        if (v == w) continue;
        const std::size_t diff = v ^ w;
        int msb = 0;
        while ((diff >> (bits - 1 - msb)) == 0) ++msb;
        d(v, w) = std::exp2(log2_distance_at(msb + 1));
      }
    return FiniteMetricSpace::create(FiniteMetricSpace::default_labels(n), d);
  }

  friend bool operator==(const GappedAlphabet&, const GappedAlphabet&) = default;
};

using Alphabet = std::variant<FiniteMetricSpace, ClusterAlphabet, GappedAlphabet>;

inline bool is_materialized(const Alphabet& a) { return std::holds_alternative<FiniteMetricSpace>(a); }

inline double alphabet_diameter(const Alphabet& a) {
  return std::visit([](const auto& x) { return x.diameter(); }, a);
}

// log2 of the alphabet size (exact for symbolic alphabets).
inline double alphabet_log2_size(const Alphabet& a) {
  if (const auto* s = std::get_if<FiniteMetricSpace>(&a)) return std::log2(static_cast<double>(s->size()));
  if (const auto* c = std::get_if<ClusterAlphabet>(&a)) return c->log2_size;
  return std::get<GappedAlphabet>(a).bits;
}

inline FiniteMetricSpace materialize(const Alphabet& a) {
  return std::visit(
      [](const auto& x) -> FiniteMetricSpace {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, FiniteMetricSpace>)
          return x;
        else
          return x.materialize();
      },
      a);
}

}  // namespace rdimlab
