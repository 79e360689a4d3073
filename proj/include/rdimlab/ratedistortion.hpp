#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rdimlab/alphabet.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/information.hpp"
#include "rdimlab/metricspace.hpp"
#include "rdimlab/system.hpp"

namespace rdimlab {

struct BaOptions {
  // Stop once the certified Lagrangian suboptimality is below this (bits).
  double tolerance = 1e-12;
  int max_iterations = 100000;
  // Warm start; uniform when empty.
  std::vector<double> initial_output;
};

struct BaResult {
  double slope = 0.0;
  double distortion = 0.0;
  double rate = 0.0;
  Matrix kernel;
  std::vector<double> output;
  int iterations = 0;
};

// Zero-rate point: the best single reproduction letter.
inline BaResult zero_rate_point(const Distribution& src, const Matrix& rho) {
  BaResult r;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < rho.cols(); ++y) {
    double d = 0.0;
    for (std::size_t x = 0; x < src.size(); ++x) d += src[x] * rho(x, y);
    if (d < best_d) {
      best_d = d;
      best = y;
    }
  }
  r.distortion = best_d;
  r.kernel = Matrix(rho.rows(), rho.cols());
  for (std::size_t x = 0; x < rho.rows(); ++x) r.kernel(x, best) = 1.0;
  r.output.assign(rho.cols(), 0.0);
  r.output[best] = 1.0;
  return r;
}

inline constexpr std::size_t kNewtonMaxSupport = 400;

// Solves the k x k system stored in a k x (k+1) augmented matrix in place by
// Gaussian elimination with partial pivoting; the solution is left in the
// last column. Returns false when the matrix is numerically singular.
inline bool solve_linear_system(Matrix& a) {
  const std::size_t k = a.rows();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300) return false;
    if (piv != col)
      for (std::size_t j = 0; j <= k; ++j) std::swap(a(piv, j), a(col, j));
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j <= k; ++j) a(r, j) -= f * a(col, j);
    }
  }
  for (std::size_t r = 0; r < k; ++r) a(r, k) /= a(r, r);
  return true;
}

// Alternating minimisation of I(X;Y) + s E rho(X,Y) (rates in bits).
inline BaResult blahut_arimoto_slope(const Distribution& src, const Matrix& rho, double s, const BaOptions& opt = {}) {
  require(s >= 0.0 && std::isfinite(s), "slope must be finite and nonnegative");
  require(rho.rows() == src.size() && rho.cols() >= 1, "distortion matrix must have one row per source letter");
  for (double v : rho.data()) require(std::isfinite(v) && v >= 0.0, "distortion must be finite and nonnegative");
  if (s == 0.0) return zero_rate_point(src, rho);

  const std::size_t nx = rho.rows(), ny = rho.cols();
  // Row-normalised factors 2^{-s (rho - min_y rho)} stay representable.
  Matrix factor(nx, ny);
  for (std::size_t x = 0; x < nx; ++x) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < ny; ++y) lo = std::min(lo, rho(x, y));
    for (std::size_t y = 0; y < ny; ++y) factor(x, y) = std::exp2(-s * (rho(x, y) - lo));
  }

  std::vector<double> out = opt.initial_output;
  if (out.size() != ny) out.assign(ny, 1.0 / static_cast<double>(ny));
  std::vector<double> c(ny);

  // Computes c_y = sum_x p(x) f(x,y) / sum_y' q(y') f(x,y') for q, advances
  // q <- q c, and returns Blahut's bound on the Lagrangian suboptimality of
  // the input q: log2 max_y c_y - sum_y q_y c_y log2 c_y. Taken over every
  // y, so letters with q_y = 0 are still checked.
  auto step = [&](std::vector<double>& q) {
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      if (src[x] <= 0.0) continue;
      double zx = 0.0;
      for (std::size_t y = 0; y < ny; ++y) zx += q[y] * factor(x, y);
      const double w = src[x] / zx;
      for (std::size_t y = 0; y < ny; ++y) c[y] += w * factor(x, y);
    }
    double max_log_c = -std::numeric_limits<double>::infinity(), mean_log_c = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      if (c[y] <= 0.0) continue;
      const double lc = std::log2(c[y]);
      max_log_c = std::max(max_log_c, lc);
      if (q[y] > 0.0) mean_log_c += q[y] * c[y] * lc;
      q[y] *= c[y];
    }
    return max_log_c - mean_log_c;
  };

  auto finish = [&](std::vector<double> q, int iterations) {
    BaResult r;
    r.slope = s;
    r.kernel = Matrix(nx, ny);
    for (std::size_t x = 0; x < nx; ++x) {
      double zx = 0.0;
      for (std::size_t y = 0; y < ny; ++y) zx += q[y] * factor(x, y);
      for (std::size_t y = 0; y < ny; ++y) {
        const double k = q[y] * factor(x, y) / zx;
        r.kernel(x, y) = k;
        r.distortion += src[x] * k * rho(x, y);
      }
    }
    r.rate = mutual_information(src, r.kernel);
    r.output = std::move(q);
    r.iterations = iterations;
    return r;
  };

  // Certified gap of q without advancing it.
  auto gap_of = [&](const std::vector<double>& q) {
    std::vector<double> copy(q);
    return step(copy);
  };

  // Near slopes where an output letter enters or leaves the support BA
  // converges like 1/k. At checkpoints k = 256, 512, ... an active-set
  // Newton method polishes the dual objective
  //   F(q) = -sum_x p(x) ln sum_y q_y f(x,y)
  // over the simplex; its result is accepted only if the gap bound certifies
  // it.
  auto newton_polish = [&](std::vector<double> q) -> std::optional<std::vector<double>> {
    std::vector<std::size_t> support;
    auto rebuild = [&] {
      support.clear();
      for (std::size_t y = 0; y < ny; ++y)
        if (q[y] > 0.0) support.push_back(y);
    };
    auto objective = [&](const std::vector<double>& v) {
      double f = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        if (src[x] <= 0.0) continue;
        double zx = 0.0;
        for (std::size_t y = 0; y < ny; ++y) zx += v[y] * factor(x, y);
        f -= src[x] * std::log(zx);
      }
      return f;
    };
    rebuild();
    std::vector<double> zx(nx), cy(ny);
    for (int iter = 0; iter < 200; ++iter) {
      const std::size_t m = support.size();
      if (m == 0 || m > kNewtonMaxSupport) return std::nullopt;
      for (std::size_t x = 0; x < nx; ++x) {
        zx[x] = 0.0;
        for (std::size_t y : support) zx[x] += q[y] * factor(x, y);
      }
      std::fill(cy.begin(), cy.end(), 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        if (src[x] <= 0.0) continue;
        for (std::size_t y = 0; y < ny; ++y) cy[y] += src[x] * factor(x, y) / zx[x];
      }
      double worst_in = 0.0;
      for (std::size_t y : support) worst_in = std::max(worst_in, std::abs(cy[y] - 1.0));
      if (worst_in < 1e-13) {
        // Stationary on the support; enter the most violated outside letter.
        std::size_t best = ny;
        double best_c = 1.0 + 1e-13;
        for (std::size_t y = 0; y < ny; ++y)
          if (q[y] == 0.0 && cy[y] > best_c) best_c = cy[y], best = y;
        if (best == ny) break;
        for (double& v : q) v *= 1.0 - 1e-6;
        q[best] = 1e-6;
        rebuild();
        continue;
      }
      // KKT system [H 1; 1^T 0] [d; -nu] = [c; 0] on the support.
      const std::size_t k = m + 1;
      Matrix sys(k, k + 1);
      for (std::size_t x = 0; x < nx; ++x) {
        if (src[x] <= 0.0) continue;
        const double w = src[x] / (zx[x] * zx[x]);
        for (std::size_t i = 0; i < m; ++i) {
          const double fi = w * factor(x, support[i]);
          if (fi == 0.0) continue;
          for (std::size_t j = 0; j < m; ++j) sys(i, j) += fi * factor(x, support[j]);
        }
      }
      double trace = 0.0;
      for (std::size_t i = 0; i < m; ++i) trace += sys(i, i);
      for (std::size_t i = 0; i < m; ++i) {
        sys(i, i) += 1e-13 * trace / static_cast<double>(m);
        sys(i, m) = sys(m, i) = 1.0;
        sys(i, k) = cy[support[i]];
      }
      if (!solve_linear_system(sys)) return std::nullopt;
      std::vector<double> d(ny, 0.0);
      double slope = 0.0, t_max = std::numeric_limits<double>::infinity();
      std::size_t blocking = ny;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t y = support[i];
        d[y] = sys(i, k);
        slope -= cy[y] * d[y];
        if (d[y] < 0.0 && -q[y] / d[y] < t_max) t_max = -q[y] / d[y], blocking = y;
      }
      if (!(slope < 0.0)) break;
      const double f0 = objective(q);
      double t = std::min(1.0, t_max);
      std::vector<double> trial(ny);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        for (std::size_t y = 0; y < ny; ++y) trial[y] = std::max(0.0, q[y] + t * d[y]);
        if (t == t_max && blocking < ny) trial[blocking] = 0.0;
        if (objective(trial) <= f0 + 1e-4 * t * slope) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      double mass = 0.0;
      for (double v : trial) mass += v;
      for (double& v : trial) v /= mass;
      q.swap(trial);
      rebuild();
    }
    if (gap_of(q) <= opt.tolerance) return q;
    return std::nullopt;
  };

  double gap = std::numeric_limits<double>::infinity();
  int used = 0;  // BA iterations plus Newton attempts
  int next_checkpoint = 256;
  std::vector<double> snapshot;
  for (int it = 1; used < opt.max_iterations; ++it) {
    ++used;
    gap = step(out);
    if (gap <= opt.tolerance) return finish(std::move(out), used);
    if (it != next_checkpoint) continue;
    next_checkpoint *= 2;
    // Letters losing a quarter of their mass since the last checkpoint are
    // treated as leaving.
    std::vector<double> pruned(out);
    for (std::size_t y = 0; y < ny; ++y)
      if (!snapshot.empty() && out[y] < 0.75 * snapshot[y]) pruned[y] = 0.0;
    snapshot = out;
    double mass = 0.0;
    for (double v : pruned) mass += v;
    if (mass > 0.0) {
      for (double& v : pruned) v /= mass;
      ++used;
      if (auto q = newton_polish(std::move(pruned))) return finish(std::move(*q), used);
    }
    ++used;
    if (auto q = newton_polish(out)) return finish(std::move(*q), used);
  }
  throw ConvergenceError("Blahut-Arimoto did not converge within " + std::to_string(opt.max_iterations) +
                         " iterations at slope " + format_g9(s) + " (duality gap " + format_g9(gap) + ")");
}

struct RatePoint {
  double eps = 0.0;
  double rate = 0.0;
  double distortion = 0.0;
  double slope = 0.0;
};

inline constexpr double kZeroRateTieTolerance = 1e-12;

// R(eps) = min I(X;Y) subject to E rho <= eps, by bisection on the slope.
inline RatePoint rate_at_distortion(const Distribution& src, const Matrix& rho, double eps, const BaOptions& opt = {}) {
  require(eps > 0.0, "eps must be positive");
  const BaResult zero = zero_rate_point(src, rho);
  if (zero.distortion <= eps + kZeroRateTieTolerance) return {eps, 0.0, zero.distortion, 0.0};

  double floor = 0.0;
  for (std::size_t x = 0; x < src.size(); ++x) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < rho.cols(); ++y) lo = std::min(lo, rho(x, y));
    floor += src[x] * lo;
  }
  require(eps > floor, "eps " + format_g9(eps) + " is below the minimum achievable distortion " + format_g9(floor));

  // Every solve starts from the uniform output law: a warm start leaves
  // letters that must re-enter at tiny mass, where BA regrows them slowly.
  auto solve = [&](double s) { return blahut_arimoto_slope(src, rho, s, opt); };

  BaResult lo = zero;  // D(lo) > eps
  BaResult hi = solve(1.0);
  while (hi.distortion > eps) {
    lo = hi;
    require(hi.slope < 1e7, "slope search diverged for eps " + format_g9(eps));
    hi = solve(hi.slope * 2.0);
  }
  // R has slope -s at D(s), so s |D - eps| bounds the rate error.
  for (int iter = 0; iter < 200; ++iter) {
    if (hi.slope * std::abs(hi.distortion - eps) <= 1e-10) break;
    if (hi.slope - lo.slope < 1e-12 * std::max(1.0, hi.slope)) break;
    const double mid = 0.5 * (lo.slope + hi.slope);
    BaResult m = solve(mid);
    if (m.distortion > eps)
      lo = std::move(m);
    else
      hi = std::move(m);
  }
  if (hi.slope - lo.slope < 1e-12 * std::max(1.0, hi.slope) && lo.distortion - hi.distortion > 1e-9) {
    // Collapsed bracket across a linear piece of the curve: use the chord.
    const double t = (lo.distortion - eps) / (lo.distortion - hi.distortion);
    return {eps, lo.rate + t * (hi.rate - lo.rate), eps, hi.slope};
  }
  return {eps, std::max(0.0, hi.rate - hi.slope * (eps - hi.distortion)), eps, hi.slope};
}

struct SymmetricPoint {
  double distortion = 0.0;
  double rate = 0.0;
};

// Rate-distortion point at slope 2^{log2_slope} for a uniform source on a
// point-transitive space whose reproduction alphabet is the space itself.
// The optimal output law is uniform, so the kernel is 2^{-s d} / Z.
inline SymmetricPoint symmetric_slope_point(const DistanceProfile& p, double log2_slope) {
  const std::size_t n = p.log2_distance.size();
  std::vector<double> cost(n), lw(n);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = std::isfinite(p.log2_distance[j]) ? std::exp2(log2_slope + p.log2_distance[j]) : 0.0;
    lw[j] = p.log2_count[j] - cost[j];
  }
  const double log2_z = log2_sum_exp2(lw);
  const double log2_m = p.log2_size();
  SymmetricPoint pt;
  double neg_entropy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double mass = std::exp2(lw[j] - log2_z);  // total kernel mass of class j
    if (mass <= 0.0) continue;
    const double log2_q = -cost[j] - log2_z;
    neg_entropy += mass * log2_q;
    if (std::isfinite(p.log2_distance[j])) pt.distortion += std::exp2(lw[j] - log2_z + p.log2_distance[j]);
  }
  pt.rate = std::max(0.0, log2_m + neg_entropy);
  return pt;
}

inline double symmetric_zero_rate_distortion(const DistanceProfile& p) {
  const double log2_m = p.log2_size();
  double d = 0.0;
  for (std::size_t j = 0; j < p.log2_distance.size(); ++j)
    if (std::isfinite(p.log2_distance[j])) d += std::exp2(p.log2_count[j] - log2_m + p.log2_distance[j]);
  return d;
}

inline double symmetric_rate_at_distortion(const DistanceProfile& p, double eps) {
  require(eps > 0.0, "eps must be positive");
  if (symmetric_zero_rate_distortion(p) <= eps + kZeroRateTieTolerance) return 0.0;
  double lo = -80.0, hi = 1020.0;  // bracket on log2 s
  require(symmetric_slope_point(p, hi).distortion <= eps, "eps " + format_g9(eps) + " below representable range");
  for (int iter = 0; iter < 400 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const auto pt = symmetric_slope_point(p, mid);
    if (pt.distortion > eps)
      lo = mid;
    else
      hi = mid;
    if (std::abs(pt.distortion - eps) <= 1e-13 * eps) {
      hi = mid;
      break;
    }
  }
  return symmetric_slope_point(p, hi).rate;
}

inline DistanceProfile symbolic_profile(const Alphabet& a) {
  if (const auto* c = std::get_if<ClusterAlphabet>(&a)) return c->profile();
  if (const auto* g = std::get_if<GappedAlphabet>(&a)) return g->profile();
  throw InvalidInput("materialised alphabets have no symbolic distance profile");
}

struct RateOptions {
  BaOptions ba;
  DistortionOptions distortion;
  std::size_t block_cap = kDefaultBlockCap;
  // Largest BA matrix (states^2 entries) attempted.
  std::size_t max_matrix_entries = std::size_t{1} << 24;
};

// R_L(eps) / L^d with per-coordinate averaged distortion. Symbolic
// alphabets carry i.i.d. uniform measures, whose block rate equals the
// single-letter rate for every L.
inline double r_L(const ShiftSystem& sys, int L, double eps, const RateOptions& opt = {}) {
  require(eps > 0.0, "eps must be positive");
  if (sys.symbolic()) return symmetric_rate_at_distortion(symbolic_profile(sys.alphabet()), eps);
  if (eps >= sys.space().diameter()) return 0.0;
  const BlockSource src = build_block_source(sys, L, opt.block_cap);
  require(src.states() * src.states() <= opt.max_matrix_entries,
          "block source too large for Blahut-Arimoto (" + std::to_string(src.states()) + " states); use a smaller L");
  const Matrix rho = src.block_distortion(opt.distortion);
  return rate_at_distortion(src.law, rho, eps, opt.ba).rate / static_cast<double>(src.sites);
}

struct RDSample {
  double eps = 0.0;
  double rate = 0.0;
  int L_used = 1;
  std::optional<double> certified;
};

struct RDCurve {
  std::vector<RDSample> samples;
  std::string description;
};

inline constexpr double kCurveConvexityTolerance = 1e-6;
inline constexpr double kCurveMonotoneTolerance = 1e-9;
inline constexpr double kCertificateSlack = 1e-6;
inline constexpr double kRateTieTolerance = 1e-12;

// Violations of monotonicity, convexity and certificate consistency among
// samples sharing L_used. Empty when the curve is sound.
inline std::vector<std::string> curve_violations(const RDCurve& curve) {
  std::vector<std::string> out;
  std::vector<int> levels;
  for (const auto& s : curve.samples) {
    if (std::find(levels.begin(), levels.end(), s.L_used) == levels.end()) levels.push_back(s.L_used);
    if (s.certified && *s.certified > s.rate + kCertificateSlack)
      out.push_back("certified value exceeds rate at eps=" + format_g9(s.eps));
  }
  for (int L : levels) {
    std::vector<RDSample> pts;
    for (const auto& s : curve.samples)
      if (s.L_used == L) pts.push_back(s);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.eps < b.eps; });
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (pts[i].rate > pts[i - 1].rate + kCurveMonotoneTolerance)
        out.push_back("rate increases in eps at eps=" + format_g9(pts[i].eps) + " (L=" + std::to_string(L) + ")");
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const auto &a = pts[i - 1], &m = pts[i], &b = pts[i + 1];
      const double t = (m.eps - a.eps) / (b.eps - a.eps);
      const double chord = a.rate + t * (b.rate - a.rate);
      if (m.rate > chord + kCurveConvexityTolerance)
        out.push_back("convexity violated at eps=" + format_g9(m.eps) + " (L=" + std::to_string(L) + ")");
    }
  }
  return out;
}

// R(eps) ~ min over the schedule of r_L(eps). Every per-L curve is checked
// for monotonicity and convexity before the minimum is taken.
inline RDCurve rd_curve(const ShiftSystem& sys, const std::vector<double>& eps_grid, const std::vector<int>& schedule,
                        unsigned jobs = 1, const RateOptions& opt = {}) {
  require(!schedule.empty(), "L schedule must be nonempty");
  require(!eps_grid.empty(), "eps grid must be nonempty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    require(eps_grid[i] > 0.0, "eps grid entries must be positive");
    if (i > 0) require(eps_grid[i] < eps_grid[i - 1], "eps grid must be strictly decreasing");
  }
  std::vector<int> levels = schedule;
  if (sys.symbolic()) levels = {*std::min_element(schedule.begin(), schedule.end())};

  const std::size_t ne = eps_grid.size(), nl = levels.size();
  std::vector<double> values(ne * nl);
  parallel_for(ne * nl, jobs, [&](std::size_t k) { values[k] = r_L(sys, levels[k / ne], eps_grid[k % ne], opt); });

  for (std::size_t l = 0; l < nl; ++l) {
    RDCurve per_level;
    for (std::size_t e = 0; e < ne; ++e) per_level.samples.push_back({eps_grid[e], values[l * ne + e], levels[l], {}});
    const auto bad = curve_violations(per_level);
    if (!bad.empty()) throw ConvergenceError("rate curve invariant failed: " + bad.front());
  }

  RDCurve curve;
  curve.description = sys.name();
  for (std::size_t e = 0; e < ne; ++e) {
    std::size_t best = 0;
    // Ties within round-off go to the earliest level in the schedule.
    for (std::size_t l = 1; l < nl; ++l)
      if (values[l * ne + e] < values[best * ne + e] - kRateTieTolerance) best = l;
    curve.samples.push_back({eps_grid[e], values[best * ne + e], levels[best], {}});
  }
  return curve;
}

// eps = 2^{-t} for t = t_lo..t_hi (integer steps), decreasing in eps.
inline std::vector<double> dyadic_grid(int t_lo, int t_hi) {
  require(t_lo <= t_hi, "t range must be increasing");
  std::vector<double> g;
  for (int t = t_lo; t <= t_hi; ++t) g.push_back(std::exp2(-static_cast<double>(t)));
  return g;
}

}  // namespace rdimlab
