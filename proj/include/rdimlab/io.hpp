#pragma once

#include <cmath>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rdimlab/alphabet.hpp"
#include "rdimlab/certificates.hpp"
#include "rdimlab/constructions.hpp"
#include "rdimlab/core.hpp"
#include "rdimlab/dimension.hpp"
#include "rdimlab/metricspace.hpp"
#include "rdimlab/mixture.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab/system.hpp"

namespace rdimlab::io {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write '" + path + "'");
  out << text;
}

namespace detail {

inline std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

template <class T>
T get(const json& j, const char* key) {
  require(j.contains(key), std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

// pi P = pi for an irreducible chain, by Gaussian elimination with the
// normalisation replacing one balance equation.
inline Distribution stationary_of(const Matrix& p) {
  const std::size_t n = p.rows();
  Matrix a(n, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  a(n - 1, n) = 1.0;
  require(solve_linear_system(a), "transition matrix has no unique stationary law");
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = std::max(0.0, a(i, n));
  return Distribution::from_accumulated(std::move(pi));
}

}  // namespace detail

inline Alphabet alphabet_from_json(const json& j) {
  const std::string type = detail::get_or<std::string>(j, "type", "finite");
  if (type == "cluster")
    return ClusterAlphabet{detail::get<int>(j, "log2_size"), detail::get<double>(j, "spacing")};
  if (type == "gapped") {
    GappedAlphabet g{GapSchedule{detail::get<std::vector<std::int64_t>>(j, "a"), detail::get<std::vector<std::int64_t>>(j, "b")},
                     detail::get<int>(j, "bits")};
    require(g.bits >= 1, "gapped alphabet needs bits >= 1");
    return g;
  }
  require(type == "finite", "unknown alphabet type '" + type + "'");
  const auto dist = detail::get<std::vector<std::vector<double>>>(j, "dist");
  auto labels = j.contains("labels") ? detail::get<std::vector<std::string>>(j, "labels")
                                     : FiniteMetricSpace::default_labels(dist.size());
  return FiniteMetricSpace::create(std::move(labels), dist);
}

inline json alphabet_to_json(const Alphabet& a) {
  if (const auto* c = std::get_if<ClusterAlphabet>(&a)) return {{"type", "cluster"}, {"log2_size", c->log2_size}, {"spacing", c->spacing}};
  if (const auto* g = std::get_if<GappedAlphabet>(&a))
    return {{"type", "gapped"}, {"a", g->schedule.a}, {"b", g->schedule.b}, {"bits", g->bits}};
  const auto& s = std::get<FiniteMetricSpace>(a);
  return {{"type", "finite"}, {"labels", s.labels()}, {"dist", s.distances().to_rows()}};
}

inline ShiftSystem system_from_json(const json& j);

inline MeasureModel measure_from_json(const json& j, const Alphabet& alphabet) {
  const std::string type = detail::get<std::string>(j, "type");
  if (type == "iid") return IidModel{Distribution::create(detail::get<std::vector<double>>(j, "probs"))};
  if (type == "uniform") return UniformModel{};
  if (type == "markov") {
    const Matrix p = Matrix::from_rows(detail::get<std::vector<std::vector<double>>>(j, "transition"));
    Distribution pi = j.contains("stationary") ? Distribution::create(detail::get<std::vector<double>>(j, "stationary"))
                                               : detail::stationary_of(p);
    return MarkovModel{p, std::move(pi)};
  }
  if (type == "periodic") return PeriodicModel{detail::get<std::vector<std::size_t>>(j, "orbit")};
  if (type == "mixture") {
    std::vector<ShiftSystem> comps;
    for (const auto& c : detail::get<json>(j, "components")) {
      json cj = c;
      if (!cj.contains("alphabet") && !cj.contains("dist")) cj["alphabet"] = alphabet_to_json(alphabet);
      comps.push_back(system_from_json(cj));
    }
    return MixtureModel{detail::get<std::vector<double>>(j, "weights"), std::move(comps)};
  }
  throw InvalidInput("unknown measure type '" + type + "'");
}

// Full form {"name", "alphabet", "measure", "lattice_dim", "metric_decay"} or
// the short i.i.d. form {"labels", "dist", "probs"}.
inline ShiftSystem system_from_json(const json& j) {
  require(j.is_object(), "system must be a JSON object");
  const std::string name = detail::get_or<std::string>(j, "name", "");
  if (!j.contains("alphabet")) {
    const Alphabet a = alphabet_from_json(j);
    return ShiftSystem::iid(std::get<FiniteMetricSpace>(a), Distribution::create(detail::get<std::vector<double>>(j, "probs")), name);
  }
  const Alphabet a = alphabet_from_json(detail::get<json>(j, "alphabet"));
  const json measure = j.contains("measure") ? j.at("measure") : json{{"type", "uniform"}};
  auto model = measure_from_json(measure, a);
  return ShiftSystem::create(a, std::move(model), detail::get_or<int>(j, "lattice_dim", 1),
                             detail::get_or<double>(j, "metric_decay", 0.5), name);
}

inline json measure_to_json(const MeasureModel& m);

inline json system_to_json(const ShiftSystem& s) {
  json j;
  j["name"] = s.name();
  j["alphabet"] = alphabet_to_json(s.alphabet());
  j["measure"] = measure_to_json(s.measure());
  j["lattice_dim"] = s.lattice_dim();
  j["metric_decay"] = s.metric_decay();
  return j;
}

inline json measure_to_json(const MeasureModel& m) {
  using detail::vec;
  if (const auto* x = std::get_if<IidModel>(&m)) return {{"type", "iid"}, {"probs", vec(x->law.probs())}};
  if (std::holds_alternative<UniformModel>(m)) return {{"type", "uniform"}};
  if (const auto* x = std::get_if<MarkovModel>(&m))
    return {{"type", "markov"}, {"transition", x->transition.to_rows()}, {"stationary", vec(x->stationary.probs())}};
  if (const auto* x = std::get_if<PeriodicModel>(&m)) return {{"type", "periodic"}, {"orbit", x->orbit}};
  const auto& mix = std::get<MixtureModel>(m);
  json comps = json::array();
  for (const auto& c : mix.components) {
    json cj = system_to_json(c);
    cj.erase("alphabet");
    comps.push_back(cj);
  }
  return {{"type", "mixture"}, {"weights", mix.weights}, {"components", comps}};
}

// {"weights": [...], "components": [system, ...]}.
inline MeasureMixture mixture_from_json(const json& j) {
  require(j.is_object(), "mixture must be a JSON object");
  std::vector<ShiftSystem> comps;
  for (const auto& c : detail::get<json>(j, "components")) comps.push_back(system_from_json(c));
  return MeasureMixture::create(detail::get<std::vector<double>>(j, "weights"), std::move(comps));
}

inline json mixture_to_json(const MeasureMixture& m) {
  json comps = json::array();
  for (const auto& c : m.components()) comps.push_back(system_to_json(c));
  return {{"weights", m.weights()}, {"components", comps}};
}

inline bool is_mixture_json(const json& j) { return j.is_object() && j.contains("components") && !j.contains("alphabet"); }

// A system file may also hold a mixture over one alphabet.
inline ShiftSystem any_system_from_json(const json& j) {
  if (is_mixture_json(j)) {
    const auto m = mixture_from_json(j);
    return m.as_system(detail::get_or<std::string>(j, "name", "mixture"));
  }
  return system_from_json(j);
}

// ---------------------------------------------------------------------------
// Curves.

inline std::string curve_csv(const RDCurve& c) {
  std::ostringstream out;
  out << "eps,t,R,L_used,certified_lower\n";
  for (const auto& s : c.samples) {
    out << format_g9(s.eps) << ',' << format_g9(log2_inverse(s.eps)) << ',' << format_g9(s.rate) << ',' << s.L_used << ',';
    if (s.certified) out << format_g9(*s.certified);
    out << '\n';
  }
  return out.str();
}

inline json curve_to_json(const RDCurve& c) {
  json samples = json::array();
  for (const auto& s : c.samples) {
    json r = {{"eps", s.eps}, {"t", log2_inverse(s.eps)}, {"R", s.rate}, {"L_used", s.L_used}};
    r["certified_lower"] = s.certified ? json(*s.certified) : json(nullptr);
    samples.push_back(r);
  }
  return {{"description", c.description}, {"samples", samples}};
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const TailStatistics& s) {
  return {{"tail_start_t", s.t.empty() ? 0.0 : s.t[s.tail_start]}, {"upper", s.upper}, {"lower", s.lower}};
}

inline json to_json(const RdimEstimate& e) {
  return {{"upper", e.upper}, {"lower", e.lower}, {"converged", e.converged}, {"tail", to_json(e.stats)}};
}

inline json to_json(const FeasibilityReport& r) {
  json j = {{"mode", to_string(r.mode)}, {"integral", r.integral}, {"margin", r.margin}, {"worst", r.worst},
            {"feasible", r.feasible}};
  if (r.symbolic_bound) {
    j["symbolic_bound"] = *r.symbolic_bound;
    j["relies_on"] = r.symbolic;
  }
  if (r.mode == FeasibilityMode::kMonteCarlo) {
    j["samples"] = r.samples;
    j["std_error"] = r.std_error;
  }
  return j;
}

inline json to_json(const LowerBoundCertificate& c) {
  json j = {{"name", c.name}, {"a", c.a}, {"L", c.L}, {"lattice_dim", c.lattice_dim}, {"log2_lambda", c.log2_lambda}};
  if (const auto* s = std::get_if<SeparatedBound>(&c.bound))
    j["bound"] = {{"type", "separated"}, {"spacing", s->spacing}, {"log2_size", s->log2_size}, {"exact_cluster", s->exact_cluster}};
  else if (const auto* g = std::get_if<GapSeriesBound>(&c.bound))
    j["bound"] = {{"type", "gap_series"}, {"k", g->k}, {"bits", g->bits}};
  else
    j["bound"] = {{"type", "nearest_letter"}};
  if (c.verified) j["feasibility"] = to_json(*c.verified);
  return j;
}

// {"type": "cluster", "m", "g", "L"} | {"type": "gapped", "k", "L"} |
// {"type": "generic", "a", "log2_lambda", "L"} | {"type": "trivial"}.
inline LowerBoundCertificate certificate_from_json(const json& j, const ShiftSystem& sys) {
  const std::string type = detail::get<std::string>(j, "type");
  const int L = detail::get_or<int>(j, "L", 1);
  if (type == "trivial") return trivial_certificate();
  if (type == "cluster") return cluster_certificate(detail::get<int>(j, "m"), detail::get<int>(j, "g"), L, sys.lattice_dim());
  if (type == "gapped") {
    const auto* g = std::get_if<GappedAlphabet>(&sys.alphabet());
    require(g != nullptr, "gapped certificate needs a gapped alphabet");
    return gapped_certificate(*g, detail::get<int>(j, "k"), L, sys.lattice_dim());
  }
  if (type == "generic") {
    auto ll = j.at("log2_lambda").is_array() ? detail::get<std::vector<double>>(j, "log2_lambda")
                                             : std::vector<double>{detail::get<double>(j, "log2_lambda")};
    return generic_certificate(detail::get<double>(j, "a"), std::move(ll), std::nullopt, L);
  }
  throw InvalidInput("unknown certificate type '" + type + "'");
}

inline json to_json(const MixtureFormulaReport& r) {
  json rows = json::array();
  for (const auto& s : r.rows)
    rows.push_back({{"L", s.L}, {"direct", s.direct}, {"lower", s.lower}, {"upper", s.upper}, {"ok", s.ok}});
  return {{"eps", r.eps},
          {"V", r.allocation.value},
          {"allocation", r.allocation.eps},
          {"multiplier", r.allocation.multiplier},
          {"rows", rows},
          {"ok", r.ok}};
}

inline json to_json(const DecompositionReport& r) {
  json comps = json::array();
  for (const auto& c : r.components) comps.push_back(to_json(c));
  return {{"t", r.t},
          {"mixture_rate", r.mixture_rate},
          {"mixture", to_json(r.mixture)},
          {"components", comps},
          {"weighted_upper", r.weighted_upper},
          {"weighted_lower", r.weighted_lower},
          {"upper_ok", r.upper_ok},
          {"lower_ok", r.lower_ok}};
}

inline json to_json(const Section4Report& r) {
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"m", c.m}, {"g", c.g}, {"weight", c.weight}, {"bound_at_eps_1_over_g", c.bound_at_threshold},
                     {"boundary_note", "value at eps = 1/g exactly; strict inequality holds only below"},
                     {"feasibility", to_json(c.feasibility)}, {"rdim", to_json(c.rdim)}});
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"eps", row.eps}, {"certified", row.dual_bound},
                    {"single_component_bound", row.component_bound}, {"allocation_upper", row.allocation_upper}});
  return {{"growth", r.params.g}, {"weights", r.params.weights}, {"components", comps}, {"rows", rows},
          {"increasing", r.increasing}, {"sound", r.sound}, {"max_component_rdim", r.max_component_rdim}};
}

inline json to_json(const CertifiedPoint& p) {
  json j = {{"k", p.k}, {"c_k", p.c_k}, {"eps", p.eps}};
  if (p.truncation_flag) {
    j["truncated"] = true;
    return j;
  }
  j["bound"] = p.bound;
  j["slope"] = p.slope;
  j["closed_form"] = to_json(p.closed_form);
  if (p.monte_carlo) j["monte_carlo"] = to_json(*p.monte_carlo);
  return j;
}

inline json schedule_to_json(const Section5Schedule& s) {
  return {{"a", s.a}, {"b", s.b}, {"bits", s.bits}, {"k_max", s.k_max}};
}

inline json to_json(const Section5Report& r) {
  json windows = json::array();
  for (const auto& w : r.windows)
    windows.push_back({{"k", w.k}, {"t_from", w.t_lo}, {"t_to_exclusive", w.t_hi}, {"max_ratio", w.max_ratio}, {"ok", w.ok}});
  json points = json::array();
  for (const auto& p : r.points) points.push_back(to_json(p));
  json depth = json::array();
  for (const auto& [t, n] : r.cylinder_depth) depth.push_back({t, n});
  return {{"schedule", schedule_to_json(r.schedule)}, {"log2_cover_by_t", depth}, {"gap_windows", windows},
          {"certified", points}};
}

inline json to_json(const InterleavedReport& r) {
  json p1 = json::array(), p2 = json::array();
  for (const auto& p : r.first_points) p1.push_back(to_json(p));
  for (const auto& p : r.second_points) p2.push_back(to_json(p));
  return {{"first", {{"schedule", schedule_to_json(r.first)}, {"certified", p1}, {"max_slope", r.first_max_slope}}},
          {"second", {{"schedule", schedule_to_json(r.second)}, {"certified", p2}, {"max_slope", r.second_max_slope}}},
          {"mixture_upper_slope", r.mixture.mixture.upper},
          {"mixture", to_json(r.mixture)}};
}

inline json to_json(const DiscontinuityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"period", row.n}, {"L", row.L}, {"rate", row.rate}, {"bound", row.bound}});
  return {{"q", r.q}, {"eps", r.eps}, {"rows", rows}, {"marginal_wasserstein", r.marginal_distance},
          {"certified_limit", r.certified}, {"ok", r.ok}};
}

inline json to_json(const DimensionReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.eps_grid.size(); ++i)
    rows.push_back({{"t", r.entropy.t[i]}, {"S", r.entropy.value[i]}, {"S_over_t", r.entropy.ratio[i]},
                    {"R", r.curve.samples[i].rate}, {"R_over_t", r.rdim.stats.ratio[i]}});
  return {{"tail_fraction", r.tail_fraction}, {"rows", rows}, {"mmdim_upper", r.mmdim_upper},
          {"rdim", to_json(r.rdim)}};
}

}  // namespace rdimlab::io
