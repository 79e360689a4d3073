#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rdimlab/alphabet.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/metricspace.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab/system.hpp"

namespace rdimlab {

enum class CoverMethod { kTrivial, kUltrametric, kBranchAndBound, kBounds };

inline const char* to_string(CoverMethod m) {
  switch (m) {
    case CoverMethod::kTrivial: return "trivial";
    case CoverMethod::kUltrametric: return "ultrametric";
    case CoverMethod::kBranchAndBound: return "branch-and-bound";
    case CoverMethod::kBounds: return "bounds";
  }
  return "?";
}

// Minimum number of sets of diameter < eps covering a space. When the
// search is not exact, lower and upper bracket the true value.
struct CoverCount {
  std::size_t lower = 0;
  std::size_t upper = 0;
  CoverMethod method = CoverMethod::kTrivial;

  bool exact() const { return lower == upper; }
  std::size_t value() const {
    require(exact(), "covering number not resolved: bounds [" + std::to_string(lower) + ", " +
                         std::to_string(upper) + "]");
    return upper;
  }
};

namespace detail {

class Bitset {
 public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void and_with(const Bitset& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
  }

 private:
  std::vector<std::uint64_t> words_;
};

// "Close" graph: i ~ j iff d(i, j) < eps. Covers by sets of diameter < eps
// are clique covers of this graph.
struct CloseGraph {
  std::size_t n = 0;
  std::vector<Bitset> adj;
  std::vector<std::size_t> degree;

  CloseGraph(const FiniteMetricSpace& s, double eps) : n(s.size()), adj(n, Bitset(n)), degree(n, 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && s(i, j) < eps) {
          adj[i].set(j);
          ++degree[i];
        }
  }
};

// Largest pairwise-far set found greedily (low degree first); each of its
// points needs its own cover element.
inline std::size_t independent_lower_bound(const CloseGraph& g) {
  std::vector<std::size_t> order(g.n);
  for (std::size_t i = 0; i < g.n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return g.degree[a] < g.degree[b]; });
  std::vector<std::size_t> chosen;
  for (std::size_t v : order) {
    bool ok = true;
    for (std::size_t u : chosen)
      if (g.adj[v].test(u)) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(v);
  }
  return chosen.size();
}

inline std::size_t greedy_clique_cover(const CloseGraph& g) {
  std::vector<std::size_t> order(g.n);
  for (std::size_t i = 0; i < g.n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return g.degree[a] < g.degree[b]; });
  std::vector<Bitset> common;  // vertices adjacent to every member of a clique
  for (std::size_t v : order) {
    bool placed = false;
    for (auto& c : common)
      if (c.test(v)) {
        c.and_with(g.adj[v]);
        placed = true;
        break;
      }
    if (!placed) common.push_back(g.adj[v]);
  }
  return common.size();
}

struct CliqueSearch {
  const CloseGraph& g;
  std::vector<std::size_t> order;
  std::size_t best;
  std::size_t lower;
  std::size_t nodes = 0;
  std::size_t node_limit;
  bool aborted = false;

  void run(std::size_t depth, std::vector<Bitset>& cliques) {
    if (aborted || best == lower) return;
    if (++nodes > node_limit) {
      aborted = true;
      return;
    }
    if (depth == order.size()) {
      best = std::min(best, cliques.size());
      return;
    }
    const std::size_t v = order[depth];
    for (std::size_t c = 0; c < cliques.size(); ++c) {
      if (!cliques[c].test(v)) continue;
      Bitset saved = cliques[c];
      cliques[c].and_with(g.adj[v]);
      run(depth + 1, cliques);
      cliques[c] = std::move(saved);
      if (aborted || best == lower) return;
    }
    if (cliques.size() + 1 < best) {
      cliques.push_back(g.adj[v]);
      run(depth + 1, cliques);
      cliques.pop_back();
    }
  }
};

}  // namespace detail

inline constexpr std::size_t kCoverNodeLimit = 2'000'000;

// Exact minimum clique cover by branch and bound, with an independent-set
// lower bound and a greedy upper bound for early exit. Returns bounds when
// the node budget runs out.
inline CoverCount covering_number_branch_and_bound(const FiniteMetricSpace& s, double eps,
                                                   std::size_t node_limit = kCoverNodeLimit) {
  require(eps > 0.0, "eps must be positive");
  detail::CloseGraph g(s, eps);
  const std::size_t lo = detail::independent_lower_bound(g);
  const std::size_t hi = detail::greedy_clique_cover(g);
  detail::CliqueSearch search{g, {}, hi, lo, 0, node_limit};
  if (lo < hi) {
    search.order.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) search.order[i] = i;
    std::stable_sort(search.order.begin(), search.order.end(),
                     [&](auto a, auto b) { return g.degree[a] < g.degree[b]; });
    std::vector<detail::Bitset> cliques;
    search.run(0, cliques);
  }
  CoverCount c;
  c.method = search.aborted ? CoverMethod::kBounds : CoverMethod::kBranchAndBound;
  c.lower = search.aborted ? lo : search.best;
  c.upper = search.best;
  return c;
}

// In an ultrametric, "d < eps" is an equivalence relation whose classes are
// the open balls; each class has diameter < eps, so their number is exact.
inline std::size_t ultrametric_cover(const FiniteMetricSpace& s, double eps) {
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool found = false;
    for (std::size_t r : reps)
      if (s(i, r) < eps) {
        found = true;
        break;
      }
    if (!found) reps.push_back(i);
  }
  return reps.size();
}

inline constexpr std::size_t kExactCoverPoints = 20;

inline CoverCount covering_number(const FiniteMetricSpace& s, double eps) {
  require(eps > 0.0, "eps must be positive");
  if (s.diameter() < eps) return {1, 1, CoverMethod::kTrivial};
  if (s.is_ultrametric()) {
    const std::size_t n = ultrametric_cover(s, eps);
    return {n, n, CoverMethod::kUltrametric};
  }
  if (s.size() <= kExactCoverPoints) return covering_number_branch_and_bound(s, eps);
  detail::CloseGraph g(s, eps);
  return {detail::independent_lower_bound(g), detail::greedy_clique_cover(g), CoverMethod::kBounds};
}

// log2 #(A, d_A, eps), with bounds for materialised alphabets.
struct Log2Cover {
  double lower = 0.0;
  double upper = 0.0;
};

inline Log2Cover alphabet_log2_cover(const Alphabet& a, double eps) {
  if (const auto* c = std::get_if<ClusterAlphabet>(&a)) {
    const double v = c->log2_covering(eps);
    return {v, v};
  }
  if (const auto* g = std::get_if<GappedAlphabet>(&a)) {
    const double v = g->log2_covering(eps);
    return {v, v};
  }
  const auto c = covering_number(std::get<FiniteMetricSpace>(a), eps);
  return {std::log2(static_cast<double>(c.lower)), std::log2(static_cast<double>(c.upper))};
}

// Smallest l >= 0 with w^l diam_A < eps: coordinates further than l from the
// window are invisible at scale eps.
inline int metric_window(double diameter, double decay, double eps) {
  require(eps > 0.0, "eps must be positive");
  int l = 0;
  while (!(std::pow(decay, l) * diameter < eps)) {
    ++l;
    require(l < 4096, "metric window diverged");
  }
  return l;
}

struct EntropyAtScale {
  double value = 0.0;    // bits per site
  double lower = 0.0;    // value brackets S when the cover count is not exact
  double upper = 0.0;
  int window = 0;        // l(eps)
  bool closed_form = true;
  // For extrapolated (non full shift) systems: (1/L) log2 # at L and L + 1.
  int L = 0;
  double at_L = 0.0;
  double at_L_plus_1 = 0.0;
};

namespace detail {

// Words of length n with positive probability under the system's measure.
inline std::vector<std::vector<std::size_t>> admissible_words(const ShiftSystem& sys, int n, std::size_t cap) {
  const BlockSource src = build_block_source(sys, n, cap);
  std::vector<std::vector<std::size_t>> words;
  for (std::size_t b = 0; b < src.states(); ++b)
    if (src.law[b] > 0.0) words.push_back(src.letters(b));
  return words;
}

// Covering number of a word set under the sup over positions of d_A.
inline CoverCount word_cover(const FiniteMetricSpace& a, const std::vector<std::vector<std::size_t>>& words,
                             double eps) {
  const std::size_t n = words.size();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double m = 0.0;
      for (std::size_t k = 0; k < words[i].size(); ++k) m = std::max(m, a(words[i][k], words[j][k]));
      d(i, j) = d(j, i) = m;
    }
  return covering_number(FiniteMetricSpace::create(FiniteMetricSpace::default_labels(n), d), eps);
}

}  // namespace detail

inline constexpr std::size_t kWordCap = 4096;

// S(X, T, d, eps) = lim_L (1/L^d) log2 #(X, d_L, eps). For full shifts the
// cover of X under d_L factors over coordinates, giving log2 #(A, d_A, eps).
// Other measures are supported on a subshift; there S is extrapolated from
// covers of the admissible words of length L <= Lmax.
inline EntropyAtScale entropy_at_scale(const ShiftSystem& sys, double eps, int Lmax = 6) {
  require(eps > 0.0, "eps must be positive");
  EntropyAtScale out;
  const double diam = alphabet_diameter(sys.alphabet());
  out.window = metric_window(diam, sys.metric_decay(), eps);
  if (diam < eps) return out;
  if (sys.full_support()) {
    const auto c = alphabet_log2_cover(sys.alphabet(), eps);
    out.lower = c.lower;
    out.upper = out.value = c.upper;
    return out;
  }
  require(sys.lattice_dim() == 1, "entropy at scale of a subshift needs lattice dimension 1");
  out.closed_form = false;
  const auto& a = sys.space();
  int L = 1;
  double prev = 0.0, cur = 0.0;
  for (int n = 1; n <= Lmax + 1; ++n) {
    std::vector<std::vector<std::size_t>> words;
    try {
      words = detail::admissible_words(sys, n, std::size_t{1} << 20);
    } catch (const InvalidInput&) {
      break;
    }
    if (words.size() > kWordCap) break;
    const auto c = detail::word_cover(a, words, eps);
    prev = cur;
    cur = std::log2(static_cast<double>(c.upper));
    L = n;
  }
  require(L >= 2, "alphabet too large to extrapolate entropy at scale");
  out.L = L - 1;
  out.at_L = prev / static_cast<double>(L - 1);
  out.at_L_plus_1 = cur / static_cast<double>(L);
  // Word covers are submultiplicative in L, so (1/L) log2 # bounds S above.
  out.value = out.upper = std::min(out.at_L, out.at_L_plus_1);
  out.lower = 0.0;
  return out;
}

inline double log2_inverse(double eps) { return -std::log2(eps); }

struct TailStatistics {
  std::vector<double> t;
  std::vector<double> value;   // quantity at 2^{-t}
  std::vector<double> ratio;   // value / t
  std::size_t tail_start = 0;  // first index of the tail window
  double upper = 0.0;          // max ratio over the tail
  double lower = 0.0;          // min ratio over the tail
};

inline TailStatistics tail_statistics(std::vector<double> t, std::vector<double> value, double tail_fraction) {
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail fraction must lie in (0, 1]");
  TailStatistics s;
  s.t = std::move(t);
  s.value = std::move(value);
  const std::size_t n = s.t.size();
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
  require(n > 0 && tail > 0, "tail window is empty");
  s.tail_start = n - tail;
  s.upper = -INFINITY;
  s.lower = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    require(s.t[i] > 0.0, "tail statistics need t > 0");
    s.ratio.push_back(s.value[i] / s.t[i]);
    if (i >= s.tail_start) {
      s.upper = std::max(s.upper, s.ratio.back());
      s.lower = std::min(s.lower, s.ratio.back());
    }
  }
  return s;
}

inline constexpr double kDefaultTailFraction = 0.5;

// Upper metric mean dimension: limsup of S(2^{-t}) / t, estimated by the
// maximum over the tail window of an increasing t grid.
inline TailStatistics metric_mean_dim_upper(const ShiftSystem& sys, const std::vector<double>& t_grid,
                                            double tail_fraction = kDefaultTailFraction) {
  require(t_grid.size() >= 3, "metric mean dimension needs at least 3 grid points");
  std::vector<double> s;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (i > 0) require(t_grid[i] > t_grid[i - 1], "t grid must be increasing");
    s.push_back(entropy_at_scale(sys, std::exp2(-t_grid[i])).value);
    if (i > 0) require(s[i] + 1e-12 >= s[i - 1], "entropy at scale decreased as eps shrank");
  }
  return tail_statistics(t_grid, std::move(s), tail_fraction);
}

inline constexpr double kRdimSpreadFlag = 0.1;

struct RdimEstimate {
  TailStatistics stats;
  double upper = 0.0;
  double lower = 0.0;
  bool converged = true;  // false when upper - lower > 0.1
};

// Upper and lower rate distortion dimension from a curve sampled at
// eps = 2^{-t}, with samples ordered by increasing t.
inline RdimEstimate rdim_estimates(const RDCurve& curve, double tail_fraction = kDefaultTailFraction) {
  require(!curve.samples.empty(), "curve has no samples");
  std::vector<double> t, r;
  for (const auto& s : curve.samples) {
    t.push_back(log2_inverse(s.eps));
    r.push_back(s.rate);
  }
  for (std::size_t i = 1; i < t.size(); ++i) require(t[i] > t[i - 1], "curve must be sampled at increasing t");
  RdimEstimate e;
  e.stats = tail_statistics(std::move(t), std::move(r), tail_fraction);
  e.upper = e.stats.upper;
  e.lower = e.stats.lower;
  e.converged = e.upper - e.lower <= kRdimSpreadFlag;
  return e;
}

struct DimensionReport {
  std::vector<double> eps_grid;
  TailStatistics entropy;  // S(eps) and S/t
  RDCurve curve;
  RdimEstimate rdim;
  double mmdim_upper = 0.0;
  double tail_fraction = kDefaultTailFraction;
};

inline DimensionReport dimension_report(const ShiftSystem& sys, const std::vector<double>& t_grid,
                                        const std::vector<int>& schedule, double tail_fraction = kDefaultTailFraction,
                                        unsigned jobs = 1, const RateOptions& opt = {}) {
  DimensionReport rep;
  rep.tail_fraction = tail_fraction;
  for (double t : t_grid) rep.eps_grid.push_back(std::exp2(-t));
  rep.entropy = metric_mean_dim_upper(sys, t_grid, tail_fraction);
  rep.mmdim_upper = rep.entropy.upper;
  rep.curve = rd_curve(sys, rep.eps_grid, schedule, jobs, opt);
  rep.rdim = rdim_estimates(rep.curve, tail_fraction);
  return rep;
}

}  // namespace rdimlab
