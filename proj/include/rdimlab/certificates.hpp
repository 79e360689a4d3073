#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <string>
#include <variant>
#include <vector>

#include "rdimlab/alphabet.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/metricspace.hpp"
#include "rdimlab/system.hpp"

namespace rdimlab {

// Lower bounds R_L >= -a eps + E log2 lambda from a witness (a, lambda) with
//   int lambda(x) 2^{-(a/L^d) sum_n d(T^n x, y_n)} dmu(x) <= 1   for all y.
// For product measures the integral factors over sites, so feasibility is
// checked per site with kernel 2^{-beta D(v, z)}, beta = a / (2 L^d), over
// reproduction points z of an ambient space containing the alphabet. The
// factor 1/2 is the per-coordinate distortion estimate d(T^n x, y) >=
// (1/2) D(x_n, z_n).

class CertificateRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double gap_series_constant() {
  double k = 2.0;
  for (int j = 0; j <= 40; ++j) k += std::exp2(static_cast<double>(j) - std::exp2(static_cast<double>(j)));
  return k;
}

enum class FeasibilityMode { kClosedForm, kExhaustive, kMonteCarlo };

inline const char* to_string(FeasibilityMode m) {
  switch (m) {
    case FeasibilityMode::kClosedForm: return "closedForm";
    case FeasibilityMode::kExhaustive: return "exhaustive";
    case FeasibilityMode::kMonteCarlo: return "monteCarlo";
  }
  return "?";
}

inline FeasibilityMode parse_feasibility_mode(const std::string& s) {
  if (s == "closedForm") return FeasibilityMode::kClosedForm;
  if (s == "exhaustive") return FeasibilityMode::kExhaustive;
  if (s == "monteCarlo") return FeasibilityMode::kMonteCarlo;
  throw InvalidInput("unknown feasibility mode '" + s + "' (closedForm, exhaustive, monteCarlo)");
}

// Uniform law on n points that are pairwise at least `spacing` apart: any z
// has at most one point within spacing/2. `exact_cluster` when all pairwise
// distances equal `spacing`.
struct SeparatedBound {
  double spacing = 1.0;
  double log2_size = 1.0;
  bool exact_cluster = true;
};

// Gapped alphabet, certificate at stage k: the three-term series of the
// nearest-point/ball decomposition argument.
struct GapSeriesBound {
  GapSchedule schedule;
  int bits = 1;
  int k = 1;
};

// max over letters w of sum_v p(v) lambda(v) 2^{-(beta/2) D(v, w)}: valid for
// any z by the nearest-letter triangle inequality.
struct NearestLetterBound {};

using SymbolicBound = std::variant<SeparatedBound, GapSeriesBound, NearestLetterBound>;

struct MonteCarloOptions {
  std::size_t samples = 1'000'000;  // per reproduction point
  std::size_t points = 4;           // reproduction points tried
  std::uint64_t seed = 7;
  double sigmas = 3.0;
};

inline constexpr double kFeasibilityTolerance = 1e-12;

struct FeasibilityReport {
  FeasibilityMode mode = FeasibilityMode::kClosedForm;
  double integral = 0.0;  // worst per-site integral including lambda
  double margin = 0.0;    // integral - 1
  std::string worst;      // reproduction point attaining `integral`
  std::optional<double> symbolic_bound;  // closed form: universal bound over all z
  std::string symbolic;                  // the inequality it relies on
  std::size_t samples = 0;
  double std_error = 0.0;
  bool feasible = false;
};

struct LowerBoundCertificate {
  std::string name;
  double a = 0.0;  // block slope; a / L^d per site
  int L = 1;
  int lattice_dim = 1;
  // Per-site log2 lambda: one entry (constant) or one per letter.
  std::vector<double> log2_lambda{0.0};
  std::optional<Distribution> site_law;  // needed for per-letter lambda
  SymbolicBound bound = NearestLetterBound{};
  std::optional<FeasibilityReport> verified;

  double sites() const { return std::pow(static_cast<double>(L), lattice_dim); }
  double site_slope() const { return a / sites(); }
  double beta() const { return a / (2.0 * sites()); }
  bool constant_lambda() const { return log2_lambda.size() == 1; }

  double expected_log2_lambda() const {
    if (constant_lambda()) return log2_lambda.front();
    require(site_law.has_value() && site_law->size() == log2_lambda.size(), "per-letter lambda needs the site law");
    double e = 0.0;
    for (std::size_t v = 0; v < log2_lambda.size(); ++v)
      if ((*site_law)[v] > 0.0) e += (*site_law)[v] * log2_lambda[v];
    return e;
  }

  double lambda_of(std::size_t v) const { return std::exp2(constant_lambda() ? log2_lambda.front() : log2_lambda.at(v)); }
};

inline LowerBoundCertificate trivial_certificate() {
  LowerBoundCertificate c;
  c.name = "trivial";
  return c;
}

// Cluster component with 2^g letters at pairwise distance 1/m:
// a = 4 m L^d g, per-site log2 lambda = g - 1.
inline LowerBoundCertificate cluster_certificate(int m, int g, int L = 1, int lattice_dim = 1) {
  require(m >= 1 && g >= 2, "cluster certificate needs m >= 1 and g >= 2");
  require(L >= 1, "L must be positive");
  LowerBoundCertificate c;
  c.name = "cluster(m=" + std::to_string(m) + ",g=" + std::to_string(g) + ",L=" + std::to_string(L) + ")";
  c.L = L;
  c.lattice_dim = lattice_dim;
  c.a = 4.0 * m * c.sites() * g;
  c.log2_lambda = {static_cast<double>(g - 1)};
  c.bound = SeparatedBound{1.0 / m, static_cast<double>(g), true};
  return c;
}

// Gapped alphabet at stage k: a = 2^{c_k + 2} L^d, log2 lambda = c_k - log2 K.
inline LowerBoundCertificate gapped_certificate(const GappedAlphabet& alph, int k, int L = 1, int lattice_dim = 1) {
  require(k >= 1 && static_cast<std::size_t>(k) <= alph.schedule.stages(), "stage k outside the schedule");
  const std::int64_t ck = alph.schedule.c(static_cast<std::size_t>(k));
  require(ck <= alph.bits - 2, "stage " + std::to_string(k) + " has c_k = " + std::to_string(ck) +
                                   " beyond the truncation (needs c_k <= N - 2 = " + std::to_string(alph.bits - 2) + ")");
  LowerBoundCertificate c;
  c.name = "gapped(k=" + std::to_string(k) + ",c_k=" + std::to_string(ck) + ",L=" + std::to_string(L) + ")";
  c.L = L;
  c.lattice_dim = lattice_dim;
  c.a = std::exp2(static_cast<double>(ck + 2)) * c.sites();
  c.log2_lambda = {static_cast<double>(ck) - std::log2(gap_series_constant())};
  c.bound = GapSeriesBound{alph.schedule, alph.bits, k};
  return c;
}

// Uniform law on a `spacing`-separated alphabet of n letters.
inline LowerBoundCertificate separated_certificate(std::size_t n, double spacing, double a_per_site,
                                                   double log2_lambda, bool exact_cluster, int L = 1) {
  require(n >= 2 && spacing > 0.0 && a_per_site >= 0.0, "separated certificate needs n >= 2, spacing > 0, a >= 0");
  LowerBoundCertificate c;
  c.name = "separated(n=" + std::to_string(n) + ",spacing=" + format_g9(spacing) + ")";
  c.L = L;
  c.a = a_per_site * c.sites();
  c.log2_lambda = {log2_lambda};
  c.bound = SeparatedBound{spacing, std::log2(static_cast<double>(n)), exact_cluster};
  return c;
}

// One-parameter exponential family lambda(v) = 1 / sum_w p(w) 2^{-s D(v,w)}
// style witnesses are left to callers; this one is the generic witness with
// a constant lambda and the nearest-letter bound.
inline LowerBoundCertificate generic_certificate(double a_per_site, std::vector<double> log2_lambda,
                                                 std::optional<Distribution> law = std::nullopt, int L = 1) {
  LowerBoundCertificate c;
  c.name = "generic";
  c.L = L;
  c.a = a_per_site * c.sites();
  c.log2_lambda = std::move(log2_lambda);
  c.site_law = std::move(law);
  return c;
}

namespace detail {

inline std::vector<std::vector<double>> frechet_embedding(const FiniteMetricSpace& s) {
  // v -> (d(v, u))_u is an isometry into l_inf^n.
  std::vector<std::vector<double>> pts(s.size(), std::vector<double>(s.size()));
  for (std::size_t v = 0; v < s.size(); ++v)
    for (std::size_t u = 0; u < s.size(); ++u) pts[v][u] = s(v, u);
  return pts;
}

inline double sup_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

struct Candidate {
  std::string name;
  double integral;
};

inline Candidate worst_of(const std::vector<Candidate>& cs) {
  Candidate best{"none", -INFINITY};
  for (const auto& c : cs)
    if (c.integral > best.integral) best = c;
  return best;
}

// Closed-form integrals for an exact cluster of n = 2^g letters at spacing
// delta, uniform law, constant lambda.
inline std::vector<Candidate> cluster_candidates(double log2_n, double delta, double beta, double lambda) {
  const double inv_n = std::exp2(-log2_n);
  const double far = std::exp2(-beta * delta), half = std::exp2(-beta * delta / 2.0);
  std::vector<Candidate> cs;
  cs.push_back({"letter", lambda * (inv_n + (1.0 - inv_n) * far)});
  if (log2_n >= 1.0) cs.push_back({"midpoint", lambda * (2.0 * inv_n * half + (1.0 - 2.0 * inv_n) * far)});
  cs.push_back({"center", lambda * std::exp2(-beta * delta * (1.0 - inv_n))});
  cs.push_back({"zero", lambda * far});
  return cs;
}

inline double gap_series(const GapSchedule& s, int k) {
  const std::size_t kk = static_cast<std::size_t>(k);
  const double ak = static_cast<double>(s.a.at(kk - 1));
  const double ck = static_cast<double>(s.c(kk));
  double sum = std::exp2(-std::exp2(ck - ak));
  for (double i = ak + 1.0; i <= ck; i += 1.0) sum += std::exp2(-i - std::exp2(ck - i));
  return sum + std::exp2(-ck);
}

// sum_v p(v) 2^{-s rho(v, w)} for any letter w of a gapped alphabet.
inline double gap_nearest_letter_sum(const GappedAlphabet& g, double s) {
  double sum = std::exp2(-static_cast<double>(g.bits));
  for (int i = 1; i <= g.bits; ++i)
    sum += std::exp2(-static_cast<double>(i) - s * std::exp2(g.log2_distance_at(i)));
  return sum;
}

inline FiniteMetricSpace site_space(const ShiftSystem& sys) {
  if (!sys.symbolic()) return sys.space();
  return materialize(sys.alphabet());
}

inline Distribution site_law(const ShiftSystem& sys) {
  if (!sys.symbolic()) return sys.single_letter_law();
  return Distribution::uniform(materialize(sys.alphabet()).size());
}

inline bool uniform_law(const ShiftSystem& sys) {
  if (sys.symbolic() || std::holds_alternative<UniformModel>(sys.measure())) return true;
  const Distribution p = sys.single_letter_law();
  for (double v : p.probs())
    if (std::abs(v - 1.0 / static_cast<double>(p.size())) > 1e-12) return false;
  return true;
}

inline void require_product_measure(const ShiftSystem& sys) {
  const bool product = std::holds_alternative<IidModel>(sys.measure()) || std::holds_alternative<UniformModel>(sys.measure());
  require(product, "certificate feasibility factors over sites only for i.i.d. measures");
}

inline FeasibilityReport closed_form(const LowerBoundCertificate& cert, const ShiftSystem& sys) {
  FeasibilityReport r;
  r.mode = FeasibilityMode::kClosedForm;
  const double beta = cert.beta();
  if (const auto* sb = std::get_if<SeparatedBound>(&cert.bound)) {
    require(cert.constant_lambda(), "separated-alphabet bound needs a constant lambda");
    require(uniform_law(sys), "separated-alphabet bound needs the uniform law");
    require(std::abs(alphabet_log2_size(sys.alphabet()) - sb->log2_size) < 1e-9, "certificate alphabet size mismatch");
    if (!sys.symbolic()) {
      require(sys.space().min_separation() >= sb->spacing * (1.0 - 1e-12), "alphabet is not separated at the stated spacing");
    } else if (const auto* c = std::get_if<ClusterAlphabet>(&sys.alphabet())) {
      require(c->spacing >= sb->spacing * (1.0 - 1e-12), "alphabet is not separated at the stated spacing");
    } else {
      throw InvalidInput("separated bound applies to cluster or materialised alphabets");
    }
    const double lambda = cert.lambda_of(0);
    const double universal = lambda * (std::exp2(-sb->log2_size) + std::exp2(-beta * sb->spacing / 2.0));
    r.symbolic = "lambda (1/|A| + 2^{-beta spacing/2}): at most one letter within spacing/2 of any z";
    r.symbolic_bound = universal;
    if (sb->exact_cluster) {
      const auto w = worst_of(cluster_candidates(sb->log2_size, sb->spacing, beta, lambda));
      r.integral = w.integral;
      r.worst = w.name;
    } else {
      r.integral = universal;
      r.worst = "any";
    }
  } else if (const auto* gb = std::get_if<GapSeriesBound>(&cert.bound)) {
    require(cert.constant_lambda(), "gap series bound needs a constant lambda");
    const auto* ga = std::get_if<GappedAlphabet>(&sys.alphabet());
    require(ga != nullptr && ga->schedule == gb->schedule && ga->bits == gb->bits,
            "gap series bound needs the matching gapped alphabet");
    const double ck = static_cast<double>(gb->schedule.c(static_cast<std::size_t>(gb->k)));
    require(std::abs(beta - std::exp2(ck + 1.0)) <= 1e-9 * beta, "gap series bound needs a = 2^{c_k+2} L^d");
    // The three-term series is loose on the first a_k bits, which matters at
    // small k; the nearest-letter sum it bounds is used when smaller.
    const double series = gap_series(gb->schedule, gb->k);
    const double nearest = gap_nearest_letter_sum(*ga, beta / 2.0);
    r.integral = cert.lambda_of(0) * std::min(series, nearest);
    r.symbolic = series <= nearest
                     ? "2^{-2^{c_k-a_k}} + sum_{i=a_k+1}^{c_k} 2^{-i} 2^{-2^{c_k-i}} + 2^{-c_k} <= K 2^{-c_k}"
                     : "sum_i 2^{-i} 2^{-2^{c_k} rho_i} + 2^{-N} over the nearest letter";
    r.symbolic_bound = r.integral;
    r.worst = "any";
  } else {
    const FiniteMetricSpace s = site_space(sys);
    const Distribution p = site_law(sys);
    std::vector<Candidate> cs;
    for (std::size_t w = 0; w < s.size(); ++w) {
      double total = 0.0;
      for (std::size_t v = 0; v < s.size(); ++v)
        if (p[v] > 0.0) total += p[v] * cert.lambda_of(v) * std::exp2(-beta / 2.0 * s(v, w));
      cs.push_back({"nearest " + s.labels()[w], total});
    }
    const auto w = worst_of(cs);
    r.integral = w.integral;
    r.worst = w.name;
    r.symbolic = "D(v, z) >= D(v, w)/2 for the letter w nearest to z";
    r.symbolic_bound = r.integral;
  }
  r.margin = r.integral - 1.0;
  r.feasible = r.margin <= kFeasibilityTolerance && (!r.symbolic_bound || *r.symbolic_bound <= 1.0 + kFeasibilityTolerance);
  return r;
}

inline constexpr std::size_t kExhaustiveLetters = 256;

// Direct summation over letters for reproduction points: every letter, every
// pairwise midpoint, the centroid and the origin of the Frechet embedding.
inline FeasibilityReport exhaustive(const LowerBoundCertificate& cert, const ShiftSystem& sys) {
  const FiniteMetricSpace s = site_space(sys);
  require(s.size() <= kExhaustiveLetters, "alphabet too large for exhaustive feasibility");
  const Distribution p = site_law(sys);
  const auto pts = frechet_embedding(s);
  const std::size_t n = s.size();
  const double beta = cert.beta();
  auto integral = [&](const std::vector<double>& z) {
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (p[v] > 0.0) total += p[v] * cert.lambda_of(v) * std::exp2(-beta * sup_distance(pts[v], z));
    return total;
  };
  std::vector<Candidate> cs;
  for (std::size_t w = 0; w < n; ++w) cs.push_back({"letter " + s.labels()[w], integral(pts[w])});
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t w = u + 1; w < n; ++w) {
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = 0.5 * (pts[u][i] + pts[w][i]);
      cs.push_back({"midpoint " + s.labels()[u] + "," + s.labels()[w], integral(z)});
    }
  std::vector<double> center(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t i = 0; i < n; ++i) center[i] += pts[v][i] / static_cast<double>(n);
  cs.push_back({"center", integral(center)});
  // The origin sits at distance diam from every embedded letter.
  cs.push_back({"zero", integral(std::vector<double>(n, 0.0))});
  const auto w = worst_of(cs);
  FeasibilityReport r;
  r.mode = FeasibilityMode::kExhaustive;
  r.integral = w.integral;
  r.worst = w.name;
  r.margin = r.integral - 1.0;
  r.feasible = r.margin <= kFeasibilityTolerance;
  return r;
}

// Stratified estimate for a gapped alphabet: z = (2^{-h(m)} u_m)_m for random
// u in [0,1]^N, strata by the first bit where v leaves round(u).
inline std::pair<double, double> gapped_mc_integral(const GappedAlphabet& g, const std::vector<double>& u, double beta,
                                                    std::size_t samples, Rng& rng) {
  const int n = g.bits;
  std::vector<double> scale(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) scale[static_cast<std::size_t>(m)] = std::exp2(g.log2_distance_at(m + 1));
  std::vector<int> w(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) w[static_cast<std::size_t>(m)] = u[static_cast<std::size_t>(m)] >= 0.5 ? 1 : 0;
  auto value = [&](const std::vector<int>& v) {
    double d = 0.0;
    for (int m = 0; m < n; ++m) {
      const auto i = static_cast<std::size_t>(m);
      d = std::max(d, scale[i] * std::abs(static_cast<double>(v[i]) - u[i]));
    }
    return std::exp2(-beta * d);
  };
  const std::size_t per = std::max<std::size_t>(2, samples / static_cast<std::size_t>(n + 1));
  double est = 0.0, var = 0.0;
  std::vector<int> v(static_cast<std::size_t>(n));
  // Stratum n: v == w exactly, mass 2^{-N}.
  est += std::exp2(-static_cast<double>(n)) * value(w);
  for (int i = 1; i <= n; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < per; ++k) {
      for (int m = 0; m < n; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        if (m + 1 < i) v[mi] = w[mi];
        else if (m + 1 == i) v[mi] = 1 - w[mi];
        else v[mi] = rng.bit() ? 1 : 0;
      }
      const double x = value(v);
      s1 += x;
      s2 += x * x;
    }
    const double mean = s1 / static_cast<double>(per);
    const double sv = std::max(0.0, s2 / static_cast<double>(per) - mean * mean) * static_cast<double>(per) /
                      static_cast<double>(per - 1);
    const double mass = std::exp2(-static_cast<double>(i));
    est += mass * mean;
    var += mass * mass * sv / static_cast<double>(per);
  }
  return {est, std::sqrt(var)};
}

inline FeasibilityReport monte_carlo(const LowerBoundCertificate& cert, const ShiftSystem& sys,
                                     const MonteCarloOptions& opt) {
  require(opt.samples >= 2 && opt.points >= 1, "monte carlo needs samples >= 2 and at least one point");
  Rng rng(opt.seed);
  const double beta = cert.beta();
  FeasibilityReport r;
  r.mode = FeasibilityMode::kMonteCarlo;
  r.integral = -INFINITY;
  for (std::size_t zi = 0; zi < opt.points; ++zi) {
    double est = 0.0, se = 0.0;
    std::string name;
    if (const auto* g = std::get_if<GappedAlphabet>(&sys.alphabet())) {
      require(cert.constant_lambda(), "gapped monte carlo needs a constant lambda");
      std::vector<double> u(static_cast<std::size_t>(g->bits));
      // Point 0 is a letter, point 1 the all-halves midpoint, the rest random.
      for (auto& x : u) x = zi == 0 ? static_cast<double>(rng.bit()) : zi == 1 ? 0.5 : rng.uniform();
      std::tie(est, se) = gapped_mc_integral(*g, u, beta, opt.samples, rng);
      est *= cert.lambda_of(0);
      se *= cert.lambda_of(0);
      name = zi == 0 ? "letter" : zi == 1 ? "midpoint" : "random z#" + std::to_string(zi);
    } else if (const auto* c = std::get_if<ClusterAlphabet>(&sys.alphabet())) {
      require(cert.constant_lambda(), "cluster monte carlo needs a constant lambda");
      // z = sum_j theta_j delta e_{i_j} over up to three letters.
      const std::size_t r_support = 1 + zi % 3;
      const std::vector<double> theta = zi == 0 ? std::vector<double>{1.0} : rng.simplex(r_support);
      const std::uint64_t n_letters = std::uint64_t{1} << c->log2_size;
      // Distinct support letters with merged weights.
      std::vector<std::pair<std::uint64_t, double>> support;
      for (double th : theta) {
        const std::uint64_t i = rng.next() % n_letters;
        auto it = std::find_if(support.begin(), support.end(), [&](const auto& e) { return e.first == i; });
        if (it != support.end()) it->second += th;
        else support.emplace_back(i, th);
      }
      auto value = [&](std::uint64_t v) {
        double own = 0.0, other = 0.0;
        for (const auto& [i, th] : support) {
          if (i == v) own += th;
          else other = std::max(other, th);
        }
        return std::exp2(-beta * c->spacing * std::max(1.0 - own, other));
      };
      // Two strata: the support of z (mass |S|/n) and its complement.
      const double ls = std::log2(static_cast<double>(support.size()));
      const double inside = std::exp2(ls - static_cast<double>(c->log2_size));
      const std::size_t per = std::max<std::size_t>(2, opt.samples / 2);
      auto stratum = [&](bool in, double& mean, double& var) {
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < per; ++k) {
          std::uint64_t v;
          if (in) {
            v = support[rng.index(support.size())].first;
          } else {
            do v = rng.next() % n_letters;
            while (std::any_of(support.begin(), support.end(), [&](const auto& e) { return e.first == v; }));
          }
          const double x = value(v);
          s1 += x;
          s2 += x * x;
        }
        const double np = static_cast<double>(per);
        mean = s1 / np;
        var = std::max(0.0, s2 / np - mean * mean) * np / (np - 1.0) / np;
      };
      double m_in = 0.0, v_in = 0.0, m_out = 0.0, v_out = 0.0;
      stratum(true, m_in, v_in);
      if (inside < 1.0) stratum(false, m_out, v_out);
      est = cert.lambda_of(0) * (inside * m_in + (1.0 - inside) * m_out);
      se = cert.lambda_of(0) * std::sqrt(inside * inside * v_in + (1.0 - inside) * (1.0 - inside) * v_out);
      name = "mixture of " + std::to_string(support.size()) + " letters";
    } else {
      const FiniteMetricSpace& s = sys.space();
      const Distribution p = sys.single_letter_law();
      const auto pts = frechet_embedding(s);
      const std::size_t u = rng.index(s.size()), w = rng.index(s.size());
      const double t = zi == 0 ? 1.0 : rng.uniform();
      std::vector<double> z(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) z[i] = t * pts[u][i] + (1.0 - t) * pts[w][i];
      std::vector<double> cdf;
      double acc = 0.0;
      for (double q : p.probs()) cdf.push_back(acc += q);
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t k = 0; k < opt.samples; ++k) {
        const double x = rng.uniform() * acc;
        const auto v = std::min<std::size_t>(
            static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), x) - cdf.begin()), s.size() - 1);
        const double y = cert.lambda_of(v) * std::exp2(-beta * sup_distance(pts[v], z));
        s1 += y;
        s2 += y * y;
      }
      const double ns = static_cast<double>(opt.samples);
      est = s1 / ns;
      se = std::sqrt(std::max(0.0, s2 / ns - est * est) / (ns - 1.0));
      name = "segment point " + s.labels()[u] + "," + s.labels()[w];
    }
    const double upper = est + opt.sigmas * se;
    if (upper > r.integral) {
      r.integral = upper;
      r.std_error = se;
      r.worst = name;
    }
    r.samples += opt.samples;
  }
  r.margin = r.integral - 1.0;
  r.feasible = r.margin <= kFeasibilityTolerance;
  return r;
}

}  // namespace detail

// Worst per-site feasibility integral over reproduction points; the block
// integral is its L^d-th power, so the signs of the margins agree.
inline FeasibilityReport check_feasibility(const LowerBoundCertificate& cert, const ShiftSystem& sys, FeasibilityMode mode,
                                           const MonteCarloOptions& mc = {}) {
  require(cert.a >= 0.0 && std::isfinite(cert.a), "certificate slope must be finite and nonnegative");
  require(cert.lattice_dim == sys.lattice_dim(), "certificate lattice dimension differs from the system's");
  for (double l : cert.log2_lambda) require(std::isfinite(l), "log2 lambda must be finite");
  detail::require_product_measure(sys);
  if (!cert.constant_lambda())
    require(!sys.symbolic() && cert.log2_lambda.size() == sys.alphabet_size(), "per-letter lambda needs one entry per letter");
  switch (mode) {
    case FeasibilityMode::kClosedForm: return detail::closed_form(cert, sys);
    case FeasibilityMode::kExhaustive: return detail::exhaustive(cert, sys);
    case FeasibilityMode::kMonteCarlo: return detail::monte_carlo(cert, sys, mc);
  }
  throw InvalidInput("unknown feasibility mode");
}

// Attaches the report; rejects the certificate on a positive margin.
inline LowerBoundCertificate verify_certificate(LowerBoundCertificate cert, const ShiftSystem& sys, FeasibilityMode mode,
                                                const MonteCarloOptions& mc = {}) {
  auto rep = check_feasibility(cert, sys, mode, mc);
  if (!rep.feasible)
    throw CertificateRejected("certificate " + cert.name + " infeasible in " + to_string(mode) + " mode: margin " +
                              format_g9(rep.margin) + " at " + rep.worst);
  if (!cert.constant_lambda() && !cert.site_law) cert.site_law = sys.single_letter_law();
  cert.verified = std::move(rep);
  return cert;
}

// (-a eps + E log2 lambda) / L^d, bits per site.
inline double certified_lower_bound(const LowerBoundCertificate& cert, double eps) {
  require(cert.verified.has_value() && cert.verified->feasible, "certificate " + cert.name + " is not verified");
  require(eps >= 0.0, "eps must be nonnegative");
  return -cert.site_slope() * eps + cert.expected_log2_lambda();
}

// Lower bound on the allocation value min sum w_m R_m(eps_m) from per-component
// bounds R_m(e) >= max(0, c_m - a_m e): the Lagrangian dual
//   max_{s >= 0} -s eps + sum_m w_m c_m^+ min(1, s / a_m),
// concave piecewise linear in s with breakpoints at s = a_m.
inline double mixture_dual_bound(const std::vector<double>& weights, const std::vector<LowerBoundCertificate>& certs,
                                 double eps) {
  require(weights.size() == certs.size() && !certs.empty(), "one certificate per mixture component");
  std::vector<double> c, a;
  for (const auto& cert : certs) {
    require(cert.verified.has_value() && cert.verified->feasible, "certificate " + cert.name + " is not verified");
    c.push_back(std::max(0.0, cert.expected_log2_lambda()));
    a.push_back(cert.site_slope());
  }
  auto value = [&](double s) {
    double v = -s * eps;
    for (std::size_t m = 0; m < c.size(); ++m) v += weights[m] * c[m] * (a[m] > 0.0 ? std::min(1.0, s / a[m]) : 1.0);
    return v;
  };
  double best = value(0.0);
  for (double s : a) best = std::max(best, value(s));
  return std::max(0.0, best);
}

}  // namespace rdimlab
