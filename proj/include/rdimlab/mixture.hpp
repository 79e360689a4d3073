#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rdimlab/alphabet.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/dimension.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab/system.hpp"

namespace rdimlab {

inline constexpr double kPLConvexityTolerance = 1e-6;

// Convex non-increasing piecewise-linear rate curve eps -> R(eps), defined
// on [eps.front(), inf) and constant past the last breakpoint.
class PLCurve {
 public:
  PLCurve() = default;

  static PLCurve create(std::vector<double> eps, std::vector<double> rate) {
    require(!eps.empty() && eps.size() == rate.size(), "curve needs matching, nonempty eps and rate lists");
    std::vector<std::size_t> idx(eps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });
    PLCurve c;
    for (std::size_t i : idx) {
      require(std::isfinite(eps[i]) && eps[i] >= 0.0 && std::isfinite(rate[i]) && rate[i] >= 0.0,
              "curve points must be finite and nonnegative");
      if (!c.eps_.empty() && eps[i] - c.eps_.back() <= 1e-300) {
        c.rate_.back() = std::min(c.rate_.back(), rate[i]);
        continue;
      }
      c.eps_.push_back(eps[i]);
      c.rate_.push_back(rate[i]);
    }
    c.validate();
    return c;
  }

  // Drops points that lie above the chord of their neighbours by less than
  // the tolerance, so sampled curves with rounding noise become convex.
  static PLCurve from_samples(std::vector<double> eps, std::vector<double> rate) {
    PLCurve raw = create_unchecked(std::move(eps), std::move(rate));
    PLCurve hull;
    for (std::size_t i = 0; i < raw.eps_.size(); ++i) {
      const double e = raw.eps_[i];
      const double r = i > 0 ? std::min(raw.rate_[i], hull.rate_.back()) : raw.rate_[i];
      while (hull.eps_.size() >= 2) {
        const std::size_t n = hull.eps_.size();
        const double e0 = hull.eps_[n - 2], r0 = hull.rate_[n - 2], e1 = hull.eps_[n - 1], r1 = hull.rate_[n - 1];
        // Remove the middle point when it is not strictly below the chord.
        if ((r1 - r0) * (e - e0) >= (r - r0) * (e1 - e0)) {
          const double excess = r1 - (r0 + (r - r0) * (e1 - e0) / (e - e0));
          require(excess <= kPLConvexityTolerance,
                  "sampled curve is not convex near eps=" + format_g9(e1) + " (excess " + format_g9(excess) + ")");
          hull.eps_.pop_back();
          hull.rate_.pop_back();
        } else {
          break;
        }
      }
      hull.eps_.push_back(e);
      hull.rate_.push_back(r);
    }
    return hull;
  }

  const std::vector<double>& eps() const { return eps_; }
  const std::vector<double>& rate() const { return rate_; }
  double min_eps() const { return eps_.front(); }

  double operator()(double e) const {
    require(e >= eps_.front() - 1e-15, "eps " + format_g9(e) + " below the curve's domain");
    if (e >= eps_.back()) return rate_.back();
    const auto it = std::upper_bound(eps_.begin(), eps_.end(), e);
    const std::size_t j = static_cast<std::size_t>(it - eps_.begin());
    if (j == 0) return rate_.front();
    const double t = (e - eps_[j - 1]) / (eps_[j] - eps_[j - 1]);
    return rate_[j - 1] + t * (rate_[j] - rate_[j - 1]);
  }

 private:
  static PLCurve create_unchecked(std::vector<double> eps, std::vector<double> rate) {
    require(!eps.empty() && eps.size() == rate.size(), "curve needs matching, nonempty eps and rate lists");
    std::vector<std::size_t> idx(eps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });
    PLCurve c;
    for (std::size_t i : idx) {
      if (!c.eps_.empty() && eps[i] - c.eps_.back() <= 1e-300) {
        c.rate_.back() = std::min(c.rate_.back(), rate[i]);
        continue;
      }
      c.eps_.push_back(eps[i]);
      c.rate_.push_back(rate[i]);
    }
    return c;
  }

  void validate() const {
    for (std::size_t i = 1; i < eps_.size(); ++i)
      require(rate_[i] <= rate_[i - 1] + kPLConvexityTolerance,
              "curve increases at eps=" + format_g9(eps_[i]));
    for (std::size_t i = 1; i + 1 < eps_.size(); ++i) {
      const double t = (eps_[i] - eps_[i - 1]) / (eps_[i + 1] - eps_[i - 1]);
      const double chord = rate_[i - 1] + t * (rate_[i + 1] - rate_[i - 1]);
      require(rate_[i] <= chord + kPLConvexityTolerance, "curve is not convex at eps=" + format_g9(eps_[i]));
    }
  }

  std::vector<double> eps_;
  std::vector<double> rate_;
};

struct Allocation {
  std::vector<double> eps;  // per component
  double value = 0.0;       // sum_i w_i R_i(eps_i)
  double multiplier = 0.0;  // common slope s at the optimum
  double budget_used = 0.0;
};

// min sum_i w_i R_i(eps_i) subject to sum_i w_i eps_i <= eps_total. For
// piecewise-linear convex R_i the optimum fills curve segments in order of
// steepness; segments of equal slope are filled in proportion, which keeps
// identical components on identical eps.
inline Allocation allocate(const std::vector<PLCurve>& curves, const std::vector<double>& weights, double eps_total) {
  require(eps_total > 0.0, "eps budget must be positive");
  require(!curves.empty() && curves.size() == weights.size(), "one weight per component curve");
  double wsum = 0.0;
  for (double w : weights) {
    require(w > 0.0, "weights must be positive");
    wsum += w;
  }
  require(std::abs(wsum - 1.0) <= kWeightTolerance, "weights sum to " + format_g9(wsum) + ", expected 1");

  Allocation a;
  a.eps.resize(curves.size());
  double used = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    a.eps[i] = curves[i].min_eps();
    used += weights[i] * a.eps[i];
  }
  require(used <= eps_total + 1e-15, "eps budget " + format_g9(eps_total) + " is below the smallest reachable " +
                                         format_g9(used));

  struct Segment {
    double slope;
    std::size_t comp;
    double length;  // in eps units of the component
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& e = curves[i].eps();
    const auto& r = curves[i].rate();
    for (std::size_t j = 1; j < e.size(); ++j) {
      const double slope = (r[j] - r[j - 1]) / (e[j] - e[j - 1]);
      if (slope < 0.0) segs.push_back({slope, i, e[j] - e[j - 1]});
    }
  }
  // Per component slopes are already increasing; a stable sort keeps each
  // component's segments in order.
  std::stable_sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.slope < y.slope; });

  double remaining = eps_total - used;
  std::size_t k = 0;
  while (k < segs.size() && remaining > 0.0) {
    // Group of segments with (numerically) equal slope.
    std::size_t end = k + 1;
    while (end < segs.size() && segs[end].slope - segs[k].slope <= 1e-12 * std::abs(segs[k].slope)) ++end;
    double cost = 0.0;
    for (std::size_t g = k; g < end; ++g) cost += weights[segs[g].comp] * segs[g].length;
    const double frac = std::min(1.0, remaining / cost);
    for (std::size_t g = k; g < end; ++g) a.eps[segs[g].comp] += frac * segs[g].length;
    remaining -= frac * cost;
    a.multiplier = -segs[k].slope;
    if (frac < 1.0) break;
    k = end;
  }
  if (k >= segs.size()) a.multiplier = 0.0;
  a.budget_used = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    a.value += weights[i] * curves[i](a.eps[i]);
    a.budget_used += weights[i] * a.eps[i];
  }
  // Rounding in the fill can overshoot the budget by an ulp; trim it.
  if (a.budget_used > eps_total) {
    for (std::size_t i = 0; i < curves.size(); ++i) a.eps[i] = std::max(curves[i].min_eps(), a.eps[i] * (eps_total / a.budget_used));
    a.value = 0.0;
    a.budget_used = 0.0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      a.value += weights[i] * curves[i](a.eps[i]);
      a.budget_used += weights[i] * a.eps[i];
    }
  }
  return a;
}

struct CurveSweep {
  double log2_slope_min = -8.0;
  double log2_slope_max = 16.0;
  double log2_slope_step = 0.05;
};

// Exact points (D(s), R(s)) of the per-site rate distortion curve of the
// length-L block source, from a sweep over the slope s, joined into a PL
// curve. Chords of a convex curve lie above it, so the result is an upper
// envelope that is exact at every breakpoint.
inline PLCurve sampled_curve(const ShiftSystem& sys, int L, const CurveSweep& sweep = {}, const RateOptions& opt = {}) {
  std::vector<double> eps, rate;
  if (sys.symbolic()) {
    const DistanceProfile p = symbolic_profile(sys.alphabet());
    eps.push_back(symmetric_zero_rate_distortion(p));
    rate.push_back(0.0);
    for (double ls = -80.0; ls <= 1020.0; ls += sweep.log2_slope_step) {
      const auto pt = symmetric_slope_point(p, ls);
      if (!(pt.distortion > 0.0)) break;
      eps.push_back(pt.distortion);
      rate.push_back(pt.rate);
    }
    return PLCurve::from_samples(std::move(eps), std::move(rate));
  }
  const BlockSource src = build_block_source(sys, L, opt.block_cap);
  const Matrix rho = src.block_distortion(opt.distortion);
  const double sites = static_cast<double>(src.sites);
  const auto zero = zero_rate_point(src.law, rho);
  eps.push_back(zero.distortion);
  rate.push_back(0.0);
  // Slopes act on per-site distortion, so scale by the site count.
  for (double ls = sweep.log2_slope_min; ls <= sweep.log2_slope_max + 1e-12; ls += sweep.log2_slope_step) {
    const auto r = blahut_arimoto_slope(src.law, rho, std::exp2(ls) * sites, opt.ba);
    eps.push_back(r.distortion);
    rate.push_back(r.rate / sites);
  }
  return PLCurve::from_samples(std::move(eps), std::move(rate));
}

// Finitely supported convex combination of invariant measures.
class MeasureMixture {
 public:
  static MeasureMixture create(std::vector<double> weights, std::vector<ShiftSystem> components) {
    require(!components.empty() && weights.size() == components.size(), "mixture needs one weight per component");
    double total = 0.0;
    for (double w : weights) {
      require(w > 0.0, "mixture weights must be positive");
      total += w;
    }
    require(std::abs(total - 1.0) <= kWeightTolerance,
            "mixture weights sum to " + format_g9(total) + ", expected 1");
    for (const auto& c : components)
      require(c.lattice_dim() == components.front().lattice_dim(), "mixture components must share the lattice dimension");
    MeasureMixture m;
    m.weights_ = std::move(weights);
    m.components_ = std::move(components);
    return m;
  }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ShiftSystem>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  bool common_alphabet() const {
    for (const auto& c : components_)
      if (!(c.alphabet() == components_.front().alphabet())) return false;
    return true;
  }

  // The mixture as a single system; only for components on one alphabet.
  ShiftSystem as_system(std::string name = "mixture") const {
    require(common_alphabet(), "mixture components live on different alphabets");
    return ShiftSystem::mixture(weights_, components_, std::move(name));
  }

 private:
  std::vector<double> weights_;
  std::vector<ShiftSystem> components_;
};

inline constexpr double kSandwichTolerance = 1e-3;

struct SandwichRow {
  int L = 1;
  double direct = 0.0;  // R_L(mix) / L^d
  double lower = 0.0;   // V - tol
  double upper = 0.0;   // V + log2(#components) / L^d + tol
  bool ok = false;
};

struct MixtureFormulaReport {
  double eps = 0.0;
  Allocation allocation;  // V = allocation.value
  std::vector<SandwichRow> rows;
  bool ok = true;
};

inline double classification_overhead(std::size_t components) {
  return std::log2(static_cast<double>(components));
}

inline std::vector<PLCurve> component_curves(const MeasureMixture& mix, int L, const CurveSweep& sweep = {},
                                             unsigned jobs = 1, const RateOptions& opt = {}) {
  std::vector<PLCurve> curves(mix.size());
  parallel_for(mix.size(), jobs, [&](std::size_t i) { curves[i] = sampled_curve(mix.components()[i], L, sweep, opt); });
  return curves;
}

// V(eps) from the allocation formula against direct R_L(mix)/L^d:
// V - tol <= R_L / L^d <= V + log2(#components) / L^d + tol.
// `curves` are the component curves at the largest L, reusable across eps.
inline MixtureFormulaReport mixture_formula_check(const MeasureMixture& mix, const std::vector<PLCurve>& curves, double eps,
                                                  const std::vector<int>& Lset, unsigned jobs = 1,
                                                  const RateOptions& opt = {}) {
  require(!Lset.empty(), "L set must be nonempty");
  const ShiftSystem sys = mix.as_system();
  MixtureFormulaReport rep;
  rep.eps = eps;
  rep.allocation = allocate(curves, mix.weights(), eps);
  const double v = rep.allocation.value;
  std::vector<double> direct(Lset.size());
  parallel_for(Lset.size(), jobs, [&](std::size_t i) { direct[i] = r_L(sys, Lset[i], eps, opt); });
  for (std::size_t i = 0; i < Lset.size(); ++i) {
    SandwichRow row;
    row.L = Lset[i];
    const double sites = std::pow(static_cast<double>(row.L), sys.lattice_dim());
    row.direct = direct[i];
    row.lower = v - kSandwichTolerance;
    row.upper = v + classification_overhead(mix.size()) / sites + kSandwichTolerance;
    row.ok = row.lower <= row.direct && row.direct <= row.upper;
    rep.ok = rep.ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

inline MixtureFormulaReport mixture_formula_check(const MeasureMixture& mix, double eps, const std::vector<int>& Lset,
                                                  unsigned jobs = 1, const RateOptions& opt = {}) {
  require(!Lset.empty(), "L set must be nonempty");
  const int Lmax = *std::max_element(Lset.begin(), Lset.end());
  return mixture_formula_check(mix, component_curves(mix, Lmax, {}, jobs, opt), eps, Lset, jobs, opt);
}

inline constexpr double kDecompositionSlack = 0.1;

struct DecompositionReport {
  std::vector<double> t;
  std::vector<double> mixture_rate;                 // R(mix, 2^{-t}) from the allocation formula
  std::vector<std::vector<double>> component_rate;  // R(nu_i, 2^{-t})
  RdimEstimate mixture;
  std::vector<RdimEstimate> components;
  double weighted_upper = 0.0;  // sum_i w_i upper_i
  double weighted_lower = 0.0;
  bool upper_ok = true;  // upper(mix) <= weighted_upper + 0.1
  bool lower_ok = true;  // lower(mix) >= weighted_lower - 0.1
};

// Rate distortion dimensions of a mixture against its components. The
// mixture curve is R(mix, eps) = min allocation over the component curves,
// which also covers components on different alphabets.
inline DecompositionReport decomposition_experiment(const MeasureMixture& mix, const std::vector<double>& t_grid,
                                                    int L = 1, double tail_fraction = kDefaultTailFraction,
                                                    unsigned jobs = 1, const CurveSweep& sweep = {},
                                                    const RateOptions& opt = {}) {
  require(t_grid.size() >= 2, "decomposition needs at least two grid points");
  for (std::size_t i = 1; i < t_grid.size(); ++i) require(t_grid[i] > t_grid[i - 1], "t grid must be increasing");
  DecompositionReport rep;
  rep.t = t_grid;
  const auto curves = component_curves(mix, L, sweep, jobs, opt);
  rep.component_rate.assign(mix.size(), {});
  for (double t : t_grid) {
    const double eps = std::exp2(-t);
    rep.mixture_rate.push_back(allocate(curves, mix.weights(), eps).value);
    for (std::size_t i = 0; i < mix.size(); ++i) rep.component_rate[i].push_back(curves[i](std::max(eps, curves[i].min_eps())));
  }
  auto estimate = [&](const std::vector<double>& r) {
    RDCurve c;
    for (std::size_t k = 0; k < t_grid.size(); ++k) c.samples.push_back({std::exp2(-t_grid[k]), r[k], L, {}});
    return rdim_estimates(c, tail_fraction);
  };
  rep.mixture = estimate(rep.mixture_rate);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    rep.components.push_back(estimate(rep.component_rate[i]));
    rep.weighted_upper += mix.weights()[i] * rep.components.back().upper;
    rep.weighted_lower += mix.weights()[i] * rep.components.back().lower;
  }
  rep.upper_ok = rep.mixture.upper <= rep.weighted_upper + kDecompositionSlack;
  rep.lower_ok = rep.mixture.lower >= rep.weighted_lower - kDecompositionSlack;
  return rep;
}

}  // namespace rdimlab
