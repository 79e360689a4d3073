#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "rdimlab/alphabet.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/metricspace.hpp"

namespace rdimlab {

class ShiftSystem;

struct IidModel {
  Distribution law;
};

// I.i.d. uniform letters. The only model available on symbolic alphabets.
struct UniformModel {};

// Stationary Markov chain; lattice dimension 1 only.
struct MarkovModel {
  Matrix transition;
  Distribution stationary;
};

// Uniform phase along one periodic orbit; lattice dimension 1 only.
struct PeriodicModel {
  std::vector<std::size_t> orbit;
};

struct MixtureModel {
  std::vector<double> weights;
  std::vector<ShiftSystem> components;
};

using MeasureModel = std::variant<IidModel, UniformModel, MarkovModel, PeriodicModel, MixtureModel>;

inline constexpr double kStationaryTolerance = 1e-10;
inline constexpr double kWeightTolerance = 1e-12;

// A Z^d full shift over a finite metric alphabet with an invariant measure
// and the sequence metric d(x, y) = sup_n w^{|n|} d_A(x_n, y_n).
class ShiftSystem {
 public:
  static ShiftSystem create(Alphabet alphabet, MeasureModel measure, int lattice_dim = 1,
                            double metric_decay = 0.5, std::string name = {}) {
    ShiftSystem s;
    s.alphabet_ = std::move(alphabet);
    s.measure_ = std::move(measure);
    s.lattice_dim_ = lattice_dim;
    s.metric_decay_ = metric_decay;
    s.name_ = std::move(name);
    s.validate();
    return s;
  }

  static ShiftSystem iid(FiniteMetricSpace alphabet, Distribution law, std::string name = {}) {
    return create(std::move(alphabet), IidModel{std::move(law)}, 1, 0.5, std::move(name));
  }

  // Binary alphabet {0, 1} at distance 1 (Hamming distortion per site).
  static FiniteMetricSpace binary_alphabet() {
    return FiniteMetricSpace::create({"0", "1"}, std::vector<std::vector<double>>{{0.0, 1.0}, {1.0, 0.0}});
  }

  static ShiftSystem bernoulli(double p, std::string name = {}) {
    return iid(binary_alphabet(), Distribution::bernoulli(p), name.empty() ? "bernoulli(" + format_g9(p) + ")" : name);
  }

  static ShiftSystem mixture(std::vector<double> weights, std::vector<ShiftSystem> components, std::string name = {}) {
    require(!components.empty(), "mixture needs at least one component");
    Alphabet a = components.front().alphabet();
    const int d = components.front().lattice_dim();
    const double w = components.front().metric_decay();
    return create(std::move(a), MixtureModel{std::move(weights), std::move(components)}, d, w, std::move(name));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const MeasureModel& measure() const { return measure_; }
  int lattice_dim() const { return lattice_dim_; }
  double metric_decay() const { return metric_decay_; }
  const std::string& name() const { return name_; }

  bool symbolic() const { return !is_materialized(alphabet_); }

  const FiniteMetricSpace& space() const {
    require(!symbolic(), "system '" + name_ + "' has a symbolic alphabet");
    return std::get<FiniteMetricSpace>(alphabet_);
  }

  std::size_t alphabet_size() const { return space().size(); }

  // Law of the letter at the origin.
  Distribution single_letter_law() const {
    return std::visit([this](const auto& m) { return letter_law(m); }, measure_);
  }

  // True when the topological support is the whole full shift.
  bool full_support() const {
    if (std::holds_alternative<UniformModel>(measure_)) return true;
    if (const auto* iid = std::get_if<IidModel>(&measure_)) return iid->law.support_size() == iid->law.size();
    if (const auto* mk = std::get_if<MarkovModel>(&measure_)) {
      for (double v : mk->transition.data())
        if (v <= 0.0) return false;
      return true;
    }
    if (const auto* mix = std::get_if<MixtureModel>(&measure_)) {
      for (const auto& c : mix->components)
        if (c.full_support()) return true;
    }
    return false;
  }

 private:
  ShiftSystem() = default;

  void validate() const {
    require(lattice_dim_ == 1 || lattice_dim_ == 2, "lattice dimension must be 1 or 2");
    require(metric_decay_ > 0.0 && metric_decay_ < 1.0, "metric decay must lie in (0, 1)");
    if (symbolic()) {
      require(std::holds_alternative<UniformModel>(measure_), "symbolic alphabets support only the uniform model");
      return;
    }
    const std::size_t n = space().size();
    std::visit([&](const auto& m) { check(m, n); }, measure_);
  }

  void check(const IidModel& m, std::size_t n) const {
    require(m.law.size() == n, "i.i.d. law size must match the alphabet");
  }
  void check(const UniformModel&, std::size_t) const {}
  void check(const MarkovModel& m, std::size_t n) const {
    require(lattice_dim_ == 1, "Markov measures need lattice dimension 1");
    require(m.transition.rows() == n && m.transition.cols() == n, "transition matrix must be |A|x|A|");
    require(m.stationary.size() == n, "stationary vector must match the alphabet");
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        require(m.transition(i, j) >= 0.0, "negative transition probability");
        row += m.transition(i, j);
      }
      require(std::abs(row - 1.0) <= kMassTolerance, "transition row " + std::to_string(i) + " does not sum to 1");
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += m.stationary[i] * m.transition(i, j);
      require(std::abs(v - m.stationary[j]) <= kStationaryTolerance, "stationary vector violates piP = pi");
    }
  }
  void check(const PeriodicModel& m, std::size_t n) const {
    require(lattice_dim_ == 1, "periodic measures need lattice dimension 1");
    require(!m.orbit.empty(), "periodic orbit must be nonempty");
    for (std::size_t x : m.orbit) require(x < n, "orbit letter out of range");
  }
  void check(const MixtureModel& m, std::size_t) const {
    require(!m.components.empty() && m.weights.size() == m.components.size(),
            "mixture needs one weight per component");
    double total = 0.0;
    for (double w : m.weights) {
      require(w > 0.0, "mixture weights must be positive");
      total += w;
    }
    require(std::abs(total - 1.0) <= kWeightTolerance,
            "mixture weights sum to " + format_g9(total) + ", expected 1");
    for (const auto& c : m.components) {
      require(c.alphabet() == alphabet_, "mixture components must share the alphabet");
      require(c.lattice_dim() == lattice_dim_, "mixture components must share the lattice dimension");
    }
  }

  Distribution letter_law(const IidModel& m) const { return m.law; }
  Distribution letter_law(const UniformModel&) const { return Distribution::uniform(space().size()); }
  Distribution letter_law(const MarkovModel& m) const { return m.stationary; }
  Distribution letter_law(const PeriodicModel& m) const {
    std::vector<double> p(space().size(), 0.0);
    for (std::size_t x : m.orbit) p[x] += 1.0 / static_cast<double>(m.orbit.size());
    return Distribution::from_accumulated(std::move(p));
  }
  Distribution letter_law(const MixtureModel& m) const {
    std::vector<double> p(space().size(), 0.0);
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      const auto law = m.components[i].single_letter_law();
      for (std::size_t x = 0; x < p.size(); ++x) p[x] += m.weights[i] * law[x];
    }
    return Distribution::from_accumulated(std::move(p));
  }

  Alphabet alphabet_;
  MeasureModel measure_;
  int lattice_dim_ = 1;
  double metric_decay_ = 0.5;
  std::string name_;
};

enum class DistortionMode {
  kPerCoordinate,     // (1/L^d) sum_n d_A(x_n, y_n)
  kWindowedSequence,  // per-site sup over a window of w^{|j|} d_A, d = 1 only
};

struct DistortionOptions {
  DistortionMode mode = DistortionMode::kPerCoordinate;
  int window = 1;
};

// Exact law of the letters on {0..L-1}^d. Block index = sum_n x_n |A|^n with
// sites enumerated row-major.
struct BlockSource {
  std::size_t alphabet_size = 0;
  int L = 1;
  int lattice_dim = 1;
  std::size_t sites = 1;
  double metric_decay = 0.5;
  Distribution law;
  Matrix letter_distortion;

  std::size_t states() const { return law.size(); }

  std::size_t letter(std::size_t block, std::size_t site) const {
    for (std::size_t s = 0; s < site; ++s) block /= alphabet_size;
    return block % alphabet_size;
  }

  std::vector<std::size_t> letters(std::size_t block) const {
    std::vector<std::size_t> out(sites);
    for (std::size_t s = 0; s < sites; ++s) {
      out[s] = block % alphabet_size;
      block /= alphabet_size;
    }
    return out;
  }

  // Law of the letter at site `site`.
  Distribution site_marginal(std::size_t site) const {
    std::vector<double> p(alphabet_size, 0.0);
    for (std::size_t b = 0; b < states(); ++b) p[letter(b, site)] += law[b];
    return Distribution::from_accumulated(std::move(p));
  }

  Matrix block_distortion(const DistortionOptions& opt = {}) const {
    const std::size_t n = states();
    Matrix rho(n, n);
    std::vector<std::vector<std::size_t>> words(n);
    for (std::size_t b = 0; b < n; ++b) words[b] = letters(b);
    const double inv = 1.0 / static_cast<double>(sites);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        double total = 0.0;
        if (opt.mode == DistortionMode::kPerCoordinate) {
          for (std::size_t s = 0; s < sites; ++s) total += letter_distortion(words[x][s], words[y][s]);
        } else {
          require(lattice_dim == 1, "windowed sequence distortion needs lattice dimension 1");
          for (int s = 0; s < L; ++s) {
            double sup = 0.0;
            for (int j = -opt.window; j <= opt.window; ++j) {
              const int t = s + j;
              if (t < 0 || t >= L) continue;
              sup = std::max(sup, std::pow(metric_decay, std::abs(j)) *
                                      letter_distortion(words[x][static_cast<std::size_t>(t)],
                                                        words[y][static_cast<std::size_t>(t)]));
            }
            total += sup;
          }
        }
        rho(x, y) = total * inv;
      }
    return rho;
  }
};

inline constexpr std::size_t kDefaultBlockCap = std::size_t{1} << 16;

namespace detail {

inline std::vector<double> block_probs(const ShiftSystem& sys, std::size_t a, int L, std::size_t sites,
                                       std::size_t states);

inline std::vector<double> block_probs_of(const IidModel& m, std::size_t a, int, std::size_t sites, std::size_t states) {
  std::vector<double> p(states, 1.0);
  for (std::size_t b = 0; b < states; ++b) {
    std::size_t code = b;
    for (std::size_t s = 0; s < sites; ++s) {
      p[b] *= m.law[code % a];
      code /= a;
    }
  }
  return p;
}

inline std::vector<double> block_probs_of(const MarkovModel& m, std::size_t a, int, std::size_t sites,
                                          std::size_t states) {
  std::vector<double> p(states);
  for (std::size_t b = 0; b < states; ++b) {
    std::size_t code = b;
    std::size_t prev = code % a;
    double v = m.stationary[prev];
    code /= a;
    for (std::size_t s = 1; s < sites; ++s) {
      const std::size_t cur = code % a;
      v *= m.transition(prev, cur);
      prev = cur;
      code /= a;
    }
    p[b] = v;
  }
  return p;
}

inline std::vector<double> block_probs_of(const PeriodicModel& m, std::size_t a, int, std::size_t sites,
                                          std::size_t states) {
  std::vector<double> p(states, 0.0);
  const std::size_t period = m.orbit.size();
  for (std::size_t phase = 0; phase < period; ++phase) {
    std::size_t code = 0, mult = 1;
    for (std::size_t s = 0; s < sites; ++s) {
      code += m.orbit[(phase + s) % period] * mult;
      mult *= a;
    }
    p[code] += 1.0 / static_cast<double>(period);
  }
  return p;
}

inline std::vector<double> block_probs_of(const MixtureModel& m, std::size_t a, int L, std::size_t sites,
                                          std::size_t states) {
  std::vector<double> p(states, 0.0);
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const auto part = block_probs(m.components[i], a, L, sites, states);
    for (std::size_t b = 0; b < states; ++b) p[b] += m.weights[i] * part[b];
  }
  return p;
}

inline std::vector<double> block_probs(const ShiftSystem& sys, std::size_t a, int L, std::size_t sites,
                                       std::size_t states) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, UniformModel>)
          return std::vector<double>(states, 1.0 / static_cast<double>(states));
        else
          return block_probs_of(m, a, L, sites, states);
      },
      sys.measure());
}

}  // namespace detail

inline BlockSource build_block_source(const ShiftSystem& sys, int L, std::size_t cap = kDefaultBlockCap) {
  require(L >= 1, "block length L must be >= 1");
  const FiniteMetricSpace& space = sys.space();
  const std::size_t a = space.size();
  const int d = sys.lattice_dim();
  if (d == 2) require(L <= 2 && a <= 16, "lattice dimension 2 supports only L <= 2 and |A| <= 16");
  const std::size_t sites = d == 1 ? static_cast<std::size_t>(L) : static_cast<std::size_t>(L * L);
  double log_states = static_cast<double>(sites) * std::log2(static_cast<double>(a));
  std::size_t states = 1;
  for (std::size_t s = 0; s < sites && log_states <= 62.0; ++s) states *= a;
  if (log_states > 62.0 || states > cap)
    throw InvalidInput("block source with |A|^(L^d) = 2^" + format_fixed(log_states, 2) +
                       " states exceeds the cap of " + std::to_string(cap) + "; use a smaller L");
  BlockSource src;
  src.alphabet_size = a;
  src.L = L;
  src.lattice_dim = d;
  src.sites = sites;
  src.metric_decay = sys.metric_decay();
  src.law = Distribution::from_accumulated(detail::block_probs(sys, a, L, sites, states));
  src.letter_distortion = space.distances();
  return src;
}

}  // namespace rdimlab
