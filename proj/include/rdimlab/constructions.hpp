#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdimlab/alphabet.hpp"
#include "rdimlab/certificates.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/dimension.hpp"
#include "rdimlab/mixture.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab/system.hpp"

namespace rdimlab {

// ---------------------------------------------------------------------------
// Cluster mixtures with unbounded per-site entropy.

struct Section4Params {
  std::vector<int> g;           // g[m-1]: component m has 2^{g} letters at spacing 1/m
  std::vector<double> weights;  // renormalised 2^{-m} unless given

  int m_max() const { return static_cast<int>(g.size()); }

  void validate() const {
    require(!g.empty(), "need at least one cluster component");
    for (std::size_t i = 0; i < g.size(); ++i) {
      require(g[i] >= 2, "growth g(m) must be at least 2");
      if (i > 0) require(g[i] > g[i - 1], "growth g(m) must be strictly increasing");
    }
    require(weights.size() == g.size(), "one weight per cluster component");
    double total = 0.0;
    for (double w : weights) {
      require(w > 0.0, "weights must be positive");
      total += w;
    }
    require(std::abs(total - 1.0) <= kWeightTolerance, "cluster weights sum to " + format_g9(total) + ", expected 1");
  }
};

inline std::vector<double> geometric_weights(int m_max) {
  std::vector<double> w;
  double total = 0.0;
  for (int m = 1; m <= m_max; ++m) total += std::exp2(-m);
  for (int m = 1; m <= m_max; ++m) w.push_back(std::exp2(-m) / total);
  return w;
}

// g(m) = 3^m.
inline Section4Params exponential_growth(int m_max) {
  Section4Params p;
  int g = 1;
  for (int m = 1; m <= m_max; ++m) p.g.push_back(g *= 3);
  p.weights = geometric_weights(m_max);
  return p;
}

// g(m) = 8m.
inline Section4Params linear_growth(int m_max) {
  Section4Params p;
  for (int m = 1; m <= m_max; ++m) p.g.push_back(8 * m);
  p.weights = geometric_weights(m_max);
  return p;
}

inline ShiftSystem build_cluster_shift(int m, int g) {
  require(m >= 1 && g >= 1, "cluster shift needs m >= 1 and g >= 1");
  return ShiftSystem::create(ClusterAlphabet{g, 1.0 / m}, UniformModel{}, 1, 0.5,
                             "cluster(m=" + std::to_string(m) + ",g=" + std::to_string(g) + ")");
}

inline MeasureMixture build_section4_mixture(const Section4Params& p) {
  p.validate();
  std::vector<ShiftSystem> comps;
  for (int m = 1; m <= p.m_max(); ++m) comps.push_back(build_cluster_shift(m, p.g[static_cast<std::size_t>(m - 1)]));
  return MeasureMixture::create(p.weights, std::move(comps));
}

struct Section4Component {
  int m = 0;
  int g = 0;
  double weight = 0.0;
  double bound_at_threshold = 0.0;  // certified R at eps = 1/g: g - 4m - 1
  FeasibilityReport feasibility;
  RdimEstimate rdim;
};

struct Section4Row {
  int n = 0;
  double eps = 0.0;                // 6^{-n}
  double dual_bound = 0.0;         // certified R(mu, eps) from all components
  double component_bound = 0.0;    // from component n alone: (w_n (g_n - 1) - 4 n g_n eps)^+
  double allocation_upper = 0.0;   // allocation over sampled component curves
};

struct Section4Report {
  Section4Params params;
  std::vector<Section4Component> components;
  std::vector<Section4Row> rows;
  bool increasing = true;
  bool sound = true;  // dual bound <= allocation upper value + 1e-6
  double max_component_rdim = 0.0;
};

inline std::vector<double> section4_rdim_grid() {
  std::vector<double> t;
  for (int i = 1; i <= 52; ++i) t.push_back(10.0 * i);
  return t;
}

inline Section4Report section4_report(const Section4Params& p, unsigned jobs = 1, bool with_rdim = true,
                                      bool with_allocation = true) {
  p.validate();
  const MeasureMixture mix = build_section4_mixture(p);
  Section4Report rep;
  rep.params = p;
  std::vector<LowerBoundCertificate> certs;
  rep.components.resize(mix.size());
  parallel_for(mix.size(), jobs, [&](std::size_t i) {
    const int m = static_cast<int>(i) + 1;
    const ShiftSystem& sys = mix.components()[i];
    Section4Component& c = rep.components[i];
    c.m = m;
    c.g = p.g[i];
    c.weight = p.weights[i];
    const auto cert = cluster_certificate(m, c.g);
    c.feasibility = check_feasibility(cert, sys, FeasibilityMode::kClosedForm);
    if (with_rdim) {
      std::vector<double> eps;
      const auto t = section4_rdim_grid();
      for (double x : t) eps.push_back(std::exp2(-x));
      c.rdim = rdim_estimates(rd_curve(sys, eps, {1}));
    }
  });
  for (std::size_t i = 0; i < mix.size(); ++i) {
    certs.push_back(verify_certificate(cluster_certificate(static_cast<int>(i) + 1, p.g[i]), mix.components()[i],
                                       FeasibilityMode::kClosedForm));
    rep.components[i].bound_at_threshold = certified_lower_bound(certs.back(), 1.0 / p.g[i]);
    rep.max_component_rdim = std::max(rep.max_component_rdim, rep.components[i].rdim.upper);
  }
  std::vector<PLCurve> curves;
  if (with_allocation) curves = component_curves(mix, 1, {}, jobs);
  for (int n = 1; n <= p.m_max(); ++n) {
    Section4Row row;
    row.n = n;
    row.eps = std::pow(6.0, -n);
    row.dual_bound = mixture_dual_bound(p.weights, certs, row.eps);
    const double gn = p.g[static_cast<std::size_t>(n - 1)];
    row.component_bound = std::max(0.0, p.weights[static_cast<std::size_t>(n - 1)] * (gn - 1.0) - 4.0 * n * gn * row.eps);
    if (with_allocation) {
      row.allocation_upper = allocate(curves, p.weights, row.eps).value;
      rep.sound = rep.sound && row.dual_bound <= row.allocation_upper + kCertificateSlack;
    }
    if (!rep.rows.empty()) rep.increasing = rep.increasing && row.dual_bound > rep.rows.back().dual_bound;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Gapped alphabets.

struct Section5Schedule {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
  int bits = 26;  // truncation N
  int k_max = 2;  // stages with certified points

  GapSchedule gap() const { return {a, b}; }
  std::int64_t c(int k) const { return static_cast<std::int64_t>(k) * a.at(static_cast<std::size_t>(k - 1)); }

  // Exact integer checks; `interleaved` adds a_{k+1} > k^2 b_k.
  void validate(bool interleaved = false) const {
    require(!a.empty(), "schedule needs at least one stage");
    require(b.size() == a.size() || b.size() + 1 == a.size(), "schedule needs one b_k per a_k (the last may be omitted)");
    require(a.front() >= 1, "a_1 must be a positive integer");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::int64_t k = static_cast<std::int64_t>(i) + 1;
      require(b[i] > k * k * a[i], "schedule violates b_k > k^2 a_k at k=" + std::to_string(k) + " (b_k=" +
                                       std::to_string(b[i]) + ", k^2 a_k=" + std::to_string(k * k * a[i]) + ")");
      if (i + 1 < a.size()) {
        require(a[i + 1] > b[i], "schedule violates a_{k+1} > b_k at k=" + std::to_string(k));
        if (interleaved)
          require(a[i + 1] > k * k * b[i], "schedule violates a_{k+1} > k^2 b_k at k=" + std::to_string(k) +
                                               " (a_{k+1}=" + std::to_string(a[i + 1]) +
                                               ", k^2 b_k=" + std::to_string(k * k * b[i]) + ")");
      }
    }
    require(k_max >= 1 && static_cast<std::size_t>(k_max) <= a.size(), "k_max outside the schedule");
    require(bits >= c(k_max), "truncation N=" + std::to_string(bits) + " is below c_kmax=" + std::to_string(c(k_max)));
    require(bits <= 1000, "truncation N must be at most 1000");
  }
};

inline Section5Schedule default_schedule() { return {{2, 12, 240}, {5, 50, 2200}, 26, 2}; }

inline ShiftSystem build_gapped_shift(const Section5Schedule& s, std::string name = "gapped") {
  s.validate();
  return ShiftSystem::create(GappedAlphabet{s.gap(), s.bits}, UniformModel{}, 1, 0.5, std::move(name));
}

// System 1 keeps (a, b); system 2 uses a' = b, b' = (a_2, a_3, ...). The
// truncation of system 2 is c'_{k_max} + 2.
inline std::pair<Section5Schedule, Section5Schedule> interleaved_schedules(const Section5Schedule& s) {
  s.validate(true);
  require(s.b.size() == s.a.size(), "interleaving needs b_k for every stage");
  Section5Schedule s2;
  s2.a = s.b;
  s2.b.assign(s.a.begin() + 1, s.a.end());
  s2.k_max = s.k_max;
  s2.bits = static_cast<int>(s2.c(s2.k_max) + 2);
  s2.validate();
  return {s, s2};
}

inline std::pair<ShiftSystem, ShiftSystem> build_interleaved_pair(const Section5Schedule& s) {
  const auto [s1, s2] = interleaved_schedules(s);
  return {build_gapped_shift(s1, "gapped-1"), build_gapped_shift(s2, "gapped-2")};
}

struct CertifiedPoint {
  int k = 0;
  std::int64_t c_k = 0;
  double eps = 0.0;
  double bound = 0.0;  // bits per site
  double slope = 0.0;  // bound / c_k
  FeasibilityReport closed_form;
  std::optional<FeasibilityReport> monte_carlo;
  bool truncation_flag = false;  // c_k > N - 2: not certified
};

struct GapWindowCheck {
  int k = 0;
  std::int64_t t_lo = 0, t_hi = 0;  // [b_k, a_{k+1})
  double max_ratio = 0.0;           // max S(2^{-t}) / t over integer t in the window
  bool ok = false;                  // max_ratio <= 1/k + 0.05
};

struct Section5Report {
  Section5Schedule schedule;
  std::vector<std::pair<int, int>> cylinder_depth;  // (t, log2 cover)
  std::vector<GapWindowCheck> windows;
  std::vector<CertifiedPoint> points;
};

inline constexpr double kGapWindowSlack = 0.05;

inline std::vector<CertifiedPoint> certified_points(const ShiftSystem& sys, const Section5Schedule& s,
                                                   std::optional<MonteCarloOptions> mc) {
  const auto& g = std::get<GappedAlphabet>(sys.alphabet());
  std::vector<CertifiedPoint> out;
  for (int k = 1; k <= s.k_max; ++k) {
    CertifiedPoint p;
    p.k = k;
    p.c_k = s.c(k);
    p.eps = std::exp2(-static_cast<double>(p.c_k));
    if (p.c_k > s.bits - 2) {
      p.truncation_flag = true;
      out.push_back(p);
      continue;
    }
    auto cert = gapped_certificate(g, k);
    p.closed_form = check_feasibility(cert, sys, FeasibilityMode::kClosedForm);
    if (mc) p.monte_carlo = check_feasibility(cert, sys, FeasibilityMode::kMonteCarlo, *mc);
    cert = verify_certificate(cert, sys, FeasibilityMode::kClosedForm);
    p.bound = certified_lower_bound(cert, p.eps);
    p.slope = p.bound / static_cast<double>(p.c_k);
    out.push_back(p);
  }
  return out;
}

inline Section5Report section5_report(const Section5Schedule& s, std::optional<MonteCarloOptions> mc = std::nullopt) {
  s.validate();
  const ShiftSystem sys = build_gapped_shift(s);
  const auto& g = std::get<GappedAlphabet>(sys.alphabet());
  Section5Report rep;
  rep.schedule = s;
  const std::int64_t t_top = std::min<std::int64_t>(s.a.back(), 4 * static_cast<std::int64_t>(s.bits) + 16);
  for (std::int64_t t = 0; t <= t_top; ++t) rep.cylinder_depth.emplace_back(static_cast<int>(t), g.cylinder_depth(std::exp2(-static_cast<double>(t))));
  for (int k = 1; k <= s.k_max && static_cast<std::size_t>(k) < s.a.size() && static_cast<std::size_t>(k) <= s.b.size(); ++k) {
    GapWindowCheck w;
    w.k = k;
    w.t_lo = s.b[static_cast<std::size_t>(k - 1)];
    w.t_hi = s.a[static_cast<std::size_t>(k)];
    for (std::int64_t t = w.t_lo; t < w.t_hi; ++t) {
      const double st = entropy_at_scale(sys, std::exp2(-static_cast<double>(t))).value;
      w.max_ratio = std::max(w.max_ratio, st / static_cast<double>(t));
    }
    w.ok = w.max_ratio <= 1.0 / k + kGapWindowSlack;
    rep.windows.push_back(w);
  }
  rep.points = certified_points(sys, s, mc);
  return rep;
}

struct InterleavedReport {
  Section5Schedule first, second;
  std::vector<CertifiedPoint> first_points, second_points;
  double first_max_slope = -INFINITY;
  double second_max_slope = -INFINITY;
  DecompositionReport mixture;  // 1/2 + 1/2 over the common t grid
};

inline std::vector<double> interleaved_t_grid(const Section5Schedule& s) {
  std::vector<double> t;
  const std::int64_t hi = s.a.at(static_cast<std::size_t>(s.k_max));  // a_{k_max + 1}
  for (std::int64_t x = s.b.front(); x <= hi; ++x) t.push_back(static_cast<double>(x));
  return t;
}

inline InterleavedReport interleaved_report(const Section5Schedule& s, std::optional<MonteCarloOptions> mc = std::nullopt,
                                            unsigned jobs = 1) {
  InterleavedReport rep;
  std::tie(rep.first, rep.second) = interleaved_schedules(s);
  const auto [sys1, sys2] = build_interleaved_pair(s);
  rep.first_points = certified_points(sys1, rep.first, mc);
  rep.second_points = certified_points(sys2, rep.second, mc);
  for (const auto& p : rep.first_points)
    if (!p.truncation_flag) rep.first_max_slope = std::max(rep.first_max_slope, p.slope);
  for (const auto& p : rep.second_points)
    if (!p.truncation_flag) rep.second_max_slope = std::max(rep.second_max_slope, p.slope);
  const auto mix = MeasureMixture::create({0.5, 0.5}, {sys1, sys2});
  rep.mixture = decomposition_experiment(mix, interleaved_t_grid(s), 1, kDefaultTailFraction, jobs);
  return rep;
}

// ---------------------------------------------------------------------------
// Periodic measures converging to the uniform i.i.d. measure.

struct DiscontinuityRow {
  int n = 0;     // period; 0 for the i.i.d. limit
  int L = 0;
  double rate = 0.0;   // r_L / L
  double bound = 0.0;  // n log2 q / L, or the certified lower bound for the limit
};

struct DiscontinuityReport {
  int q = 0;
  double eps = 0.0;
  std::vector<DiscontinuityRow> rows;
  std::vector<double> marginal_distance;  // W(mu_n 1-marginal, mu 1-marginal)
  double certified = 0.0;
  bool ok = true;
};

// mu_n: a uniform n-block repeated periodically with a uniform phase. The
// last entry is the i.i.d. uniform measure mu.
inline std::vector<ShiftSystem> build_periodic_discontinuity_demo(int q, const std::vector<int>& n_list) {
  require(q >= 2, "q must be at least 2");
  const FiniteMetricSpace grid = FiniteMetricSpace::line_grid(static_cast<std::size_t>(q), 1.0 / q);
  std::vector<ShiftSystem> out;
  for (int n : n_list) {
    require(n >= 1, "periods must be positive");
    const double blocks = std::pow(static_cast<double>(q), n);
    require(blocks <= 4096, "too many period blocks");
    std::vector<ShiftSystem> comps;
    std::vector<double> w;
    const auto count = static_cast<std::size_t>(blocks);
    for (std::size_t b = 0; b < count; ++b) {
      std::vector<std::size_t> orbit;
      std::size_t x = b;
      for (int i = 0; i < n; ++i) {
        orbit.push_back(x % static_cast<std::size_t>(q));
        x /= static_cast<std::size_t>(q);
      }
      comps.push_back(ShiftSystem::create(grid, PeriodicModel{orbit}));
      w.push_back(1.0 / blocks);
    }
    out.push_back(ShiftSystem::mixture(w, comps, "periodic(n=" + std::to_string(n) + ")"));
  }
  out.push_back(ShiftSystem::iid(grid, Distribution::uniform(static_cast<std::size_t>(q)), "iid-uniform"));
  return out;
}

inline DiscontinuityReport discontinuity_report(int q, const std::vector<int>& n_list, const std::vector<int>& Ls,
                                                double eps) {
  DiscontinuityReport rep;
  rep.q = q;
  rep.eps = eps;
  const auto systems = build_periodic_discontinuity_demo(q, n_list);
  const ShiftSystem& limit = systems.back();
  const Distribution base = limit.single_letter_law();
  for (std::size_t i = 0; i + 1 < systems.size(); ++i) {
    const int n = n_list[i];
    rep.marginal_distance.push_back(wasserstein(limit.space(), systems[i].single_letter_law(), base));
    for (int L : Ls) {
      DiscontinuityRow row{n, L, r_L(systems[i], L, eps), n * std::log2(static_cast<double>(q)) / L};
      rep.ok = rep.ok && row.rate <= row.bound + 1e-9;
      rep.rows.push_back(row);
    }
  }
  // The uniform grid is (1/q)-separated; certificate with a = 4 q g, g = log2 q.
  const double g = std::log2(static_cast<double>(q));
  auto cert = separated_certificate(static_cast<std::size_t>(q), 1.0 / q, 4.0 * q * g, g - 1.0, false);
  cert = verify_certificate(cert, limit, FeasibilityMode::kClosedForm);
  rep.certified = certified_lower_bound(cert, eps);
  for (int L : Ls) {
    DiscontinuityRow row{0, L, r_L(limit, L, eps), rep.certified};
    rep.ok = rep.ok && row.rate + 1e-6 >= row.bound;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace rdimlab
