#pragma once

// Independent reference computations. Nothing here calls the solvers it is
// used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rdimlab/core.hpp"

namespace rdimlab::oracle {

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Bernoulli(p) source, Hamming distortion: R(D) = (h(p) - h(D))^+.
inline double bernoulli_rate(double p, double d) {
  const double pm = std::min(p, 1.0 - p);
  if (d >= pm) return 0.0;
  return std::max(0.0, h2(p) - h2(d));
}

// min I(X;Y) over binary channels on a grid of step `res`, subject to the
// expected Hamming distortion being at most d.
inline double bernoulli_rate_grid(double p, double d, double res) {
  const int n = static_cast<int>(std::lround(1.0 / res));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double a = i * res;  // P(Y=1 | X=0)
    // Distortion constraint (1-p) a + p b <= d is linear in b; for fixed a
    // the rate is minimised on the boundary or at the unconstrained point.
    for (int j = 0; j <= n; ++j) {
      const double b = j * res;  // P(Y=0 | X=1)
      if ((1.0 - p) * a + p * b > d + 1e-15) break;
      const double q1 = (1.0 - p) * a + p * (1.0 - b);
      const double rate = h2(q1) - (1.0 - p) * h2(a) - p * h2(b);
      best = std::min(best, rate);
    }
  }
  return std::max(0.0, best);
}

// Two-component allocation optimum by scanning eps_1 on a grid and giving the
// rest of the budget to component 2 (rates are non-increasing, so the
// budget constraint is tight at the optimum).
template <class R1, class R2>
double allocation_grid(R1 r1, R2 r2, double w1, double eps_total, double res, double eps_cap) {
  const double w2 = 1.0 - w1;
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::floor(eps_cap / res + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double e1 = i * res;
    const double rest = eps_total - w1 * e1;
    if (rest < -1e-15) break;
    const double e2 = std::min(eps_cap, std::max(0.0, rest) / w2);
    best = std::min(best, w1 * r1(e1) + w2 * r2(e2));
  }
  return best;
}

// Two-component allocation optimum by exhaustive search over a 2-D grid of
// budgets: table_i[j] is R_i(j * res); pairs with w1 e1 + w2 e2 > eps_total
// are skipped. Tables end at each component's zero-rate distortion.
inline double allocation_grid_2d(const std::vector<double>& table1, const std::vector<double>& table2, double w1,
                                 double eps_total, double res) {
  const double w2 = 1.0 - w1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table1.size(); ++i) {
    const double e1 = static_cast<double>(i) * res;
    if (w1 * e1 > eps_total + 1e-15) break;
    for (std::size_t j = 0; j < table2.size(); ++j) {
      const double e2 = static_cast<double>(j) * res;
      if (w1 * e1 + w2 * e2 > eps_total + 1e-15) break;
      best = std::min(best, w1 * table1[i] + w2 * table2[j]);
    }
  }
  return best;
}

// Optimal transport cost by enumerating vertices of the transportation
// polytope: every basic solution is supported on a spanning tree of the
// complete bipartite graph with 2n-1 edges. Intended for n <= 4.
inline double transport_vertex_enumeration(const std::vector<std::vector<double>>& cost, const std::vector<double>& p,
                                           const std::vector<double>& q) {
  const std::size_t n = p.size();
  const std::size_t edges = n * n, pick = 2 * n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> sel(pick);
  for (std::size_t i = 0; i < pick; ++i) sel[i] = i;
  while (true) {
    // Leaf peeling: repeatedly resolve a row or column with one open edge.
    std::vector<double> rs(p), cs(q);
    std::vector<char> open(pick, 1);
    std::vector<double> flow(pick, 0.0);
    bool ok = true;
    for (std::size_t step = 0; step < pick && ok; ++step) {
      bool found = false;
      for (std::size_t node = 0; node < 2 * n && !found; ++node) {
        std::size_t count = 0, last = 0;
        for (std::size_t e = 0; e < pick; ++e) {
          if (!open[e]) continue;
          const std::size_t r = sel[e] / n, c = sel[e] % n;
          if ((node < n && r == node) || (node >= n && c == node - n)) {
            ++count;
            last = e;
          }
        }
        if (count != 1) continue;
        const std::size_t r = sel[last] / n, c = sel[last] % n;
        const double f = node < n ? rs[r] : cs[c];
        flow[last] = f;
        rs[r] -= f;
        cs[c] -= f;
        open[last] = 0;
        found = true;
      }
      if (!found) ok = false;  // contains a cycle: not a tree
    }
    if (ok) {
      double total = 0.0;
      for (std::size_t e = 0; e < pick; ++e) {
        if (flow[e] < -1e-12) ok = false;
        total += flow[e] * cost[sel[e] / n][sel[e] % n];
      }
      for (double v : rs) ok = ok && std::abs(v) < 1e-9;
      for (double v : cs) ok = ok && std::abs(v) < 1e-9;
      if (ok) best = std::min(best, total);
    }
    // next combination
    std::size_t k = pick;
    while (k > 0 && sel[k - 1] == edges - pick + k - 1) --k;
    if (k == 0) break;
    ++sel[k - 1];
    for (std::size_t j = k; j < pick; ++j) sel[j] = sel[j - 1] + 1;
  }
  return best;
}

// Minimum number of sets of diameter < eps covering all points, by dynamic
// programming over subsets. n <= 16.
inline int cover_by_subset_dp(const std::vector<std::vector<double>>& d, double eps) {
  const std::size_t n = d.size();
  const std::uint32_t full = (1u << n) - 1;
  std::vector<char> clique(full + 1, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if ((s >> i & 1) && (s >> j & 1) && !(d[i][j] < eps)) ok = false;
    clique[s] = ok;
  }
  std::vector<int> best(full + 1, 1 << 20);
  best[0] = 0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::uint32_t low = s & (~s + 1);
    for (std::uint32_t sub = s; sub; sub = (sub - 1) & s)
      if ((sub & low) && clique[sub]) best[s] = std::min(best[s], best[s ^ sub] + 1);
  }
  return best[full];
}

// The scale function of a gap schedule, written out case by case.
inline std::int64_t gap_h(const std::vector<std::int64_t>& a, std::int64_t n) {
  std::int64_t prev_c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::int64_t ck = static_cast<std::int64_t>(k + 1) * a[k];
    if (k == 0 && n <= a[0]) return n;
    if (k > 0 && n > prev_c && n <= a[k]) return a[k];
    if (n >= a[k] && n <= ck) return n;
    prev_c = ck;
  }
  return n;
}

// log2 of the covering number of the N-bit gapped alphabet at 2^{-t}: the
// smallest depth n whose cylinders have diameter < 2^{-t}.
inline int gap_cover_log2(const std::vector<std::int64_t>& a, int bits, double t) {
  int n = 0;
  while (n < bits && !(static_cast<double>(gap_h(a, n + 1)) > t)) ++n;
  return n;
}

// K = 2 + sum_{j>=0} 2^j 2^{-2^j}, summed for j <= 40.
inline double gap_series_constant() {
  double k = 2.0;
  for (int j = 0; j <= 40; ++j) k += std::exp2(static_cast<double>(j) - std::exp2(static_cast<double>(j)));
  return k;
}

}  // namespace rdimlab::oracle
