// rdimlab command line: experiment configs in, curves and reports out.
//
// Exit codes: 0 success, 1 a verification or check failed, 2 invalid input.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdimlab/certificates.hpp"
#include "rdimlab/constructions.hpp"
#include "rdimlab/dimension.hpp"
#include "rdimlab/io.hpp"
#include "rdimlab/mixture.hpp"
#include "rdimlab/ratedistortion.hpp"
#include "rdimlab_verify/acceptance.hpp"

namespace fs = std::filesystem;
using namespace rdimlab;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalid = 2;

struct Flags {
  std::string system;
  std::string config;
  std::string t;
  std::vector<double> eps;
  std::vector<int> L;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string mode;
  std::optional<std::size_t> samples;
  std::string cert;
  double tail = kDefaultTailFraction;
};

// Everything a subcommand needs, after merging the config file with flags
// (flags win).
struct Experiment {
  std::optional<json> system;
  std::optional<json> mixture;
  std::optional<json> certificate;
  std::vector<double> t_grid;  // increasing
  std::vector<double> eps;     // decreasing
  std::vector<int> L;
  std::string out;
  std::optional<std::uint64_t> seed;
  FeasibilityMode mode = FeasibilityMode::kClosedForm;
  std::size_t samples = MonteCarloOptions{}.samples;
  unsigned jobs = 1;
  double tail = kDefaultTailFraction;
};

std::vector<double> t_range(const std::string& spec) {
  const auto dots = spec.find("..");
  require(dots != std::string::npos, "--t expects A..B, got '" + spec + "'");
  double lo = 0, hi = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(spec.substr(0, dots), &used);
    require(used == dots, "");
    const std::string rest = spec.substr(dots + 2);
    hi = std::stod(rest, &used);
    require(used == rest.size(), "");
  } catch (const std::exception&) {
    throw InvalidInput("--t expects A..B with numbers, got '" + spec + "'");
  }
  require(lo > 0.0 && lo <= hi, "--t range must satisfy 0 < A <= B");
  std::vector<double> t;
  for (double v = lo; v <= hi + 1e-9; v += 1.0) t.push_back(v);
  return t;
}

json load_ref(const json& j, const fs::path& base) {
  if (j.is_string()) {
    fs::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    return io::read_json_file(p.string());
  }
  return j;
}

Experiment load(const Flags& f, bool need_input = true) {
  Experiment e;
  const std::string path = !f.config.empty() ? f.config : f.system;
  json cfg = json::object();
  fs::path base = ".";
  if (!path.empty()) {
    const json j = io::read_json_file(path);
    base = fs::path(path).parent_path();
    if (j.is_object() && (j.contains("system") || j.contains("mixture"))) {
      cfg = j;
      if (j.contains("system")) e.system = load_ref(j.at("system"), base);
      if (j.contains("mixture")) e.mixture = load_ref(j.at("mixture"), base);
    } else if (io::is_mixture_json(j)) {
      e.mixture = j;
    } else {
      e.system = j;
    }
  } else {
    require(!need_input, "--system or --config is required");
  }
  auto cfg_get = [&](const char* key) -> const json* { return cfg.contains(key) ? &cfg.at(key) : nullptr; };
  try {
    if (!f.t.empty()) {
      e.t_grid = t_range(f.t);
    } else if (const auto* t = cfg_get("t")) {
      e.t_grid = t->is_string() ? t_range(t->get<std::string>())
                                : t_range(format_g9(t->at(0).get<double>()) + ".." + format_g9(t->at(1).get<double>()));
    }
    e.eps = !f.eps.empty() ? f.eps : cfg_get("eps") ? cfg_get("eps")->get<std::vector<double>>() : std::vector<double>{};
    e.L = !f.L.empty() ? f.L : cfg_get("L") ? cfg_get("L")->get<std::vector<int>>() : std::vector<int>{};
    e.out = !f.out.empty() ? f.out : cfg_get("out") ? cfg_get("out")->get<std::string>() : "";
    if (f.seed) e.seed = f.seed;
    else if (const auto* s = cfg_get("seed")) e.seed = s->get<std::uint64_t>();
    const std::string mode = !f.mode.empty() ? f.mode : cfg_get("mode") ? cfg_get("mode")->get<std::string>() : "";
    if (!mode.empty()) e.mode = parse_feasibility_mode(mode);
    if (f.samples) e.samples = *f.samples;
    else if (const auto* s = cfg_get("samples")) e.samples = s->get<std::size_t>();
    if (!f.cert.empty()) e.certificate = io::read_json_file(f.cert);
    else if (const auto* c = cfg_get("certificate")) e.certificate = load_ref(*c, base);
  } catch (const json::exception& ex) {
    throw InvalidInput(std::string("bad config field: ") + ex.what());
  }
  e.jobs = std::max(1u, f.jobs);
  e.tail = f.tail;
  for (double x : e.eps) require(x > 0.0, "eps values must be positive");
  for (int x : e.L) require(x >= 1, "L values must be >= 1");
  std::sort(e.eps.begin(), e.eps.end(), std::greater<>());
  e.eps.erase(std::unique(e.eps.begin(), e.eps.end()), e.eps.end());
  if (e.eps.empty())
    for (double t : e.t_grid) e.eps.push_back(std::exp2(-t));
  if (e.mode == FeasibilityMode::kMonteCarlo) require(e.seed.has_value(), "monteCarlo mode needs --seed");
  return e;
}

ShiftSystem system_of(const Experiment& e) {
  if (e.system) return io::any_system_from_json(*e.system);
  require(e.mixture.has_value(), "no system given");
  return io::mixture_from_json(*e.mixture).as_system();
}

MeasureMixture mixture_of(const Experiment& e) {
  require(e.mixture.has_value(), "no mixture given (expected {\"weights\", \"components\"})");
  return io::mixture_from_json(*e.mixture);
}

MonteCarloOptions mc_of(const Experiment& e) {
  MonteCarloOptions mc;
  mc.samples = e.samples;
  if (e.seed) mc.seed = *e.seed;
  return mc;
}

std::vector<int> L_or(const Experiment& e, std::vector<int> fallback) { return e.L.empty() ? fallback : e.L; }

void emit(const Experiment& e, const std::string& text) {
  if (e.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_text(e.out, text);
  }
}

void emit(const Experiment& e, const json& j) { emit(e, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

int cmd_rd_curve(const Flags& f) {
  const Experiment e = load(f);
  require(!e.eps.empty(), "need --t A..B or --eps");
  const ShiftSystem sys = system_of(e);
  RDCurve curve = rd_curve(sys, e.eps, L_or(e, {1}), e.jobs);
  if (e.certificate) {
    auto cert = verify_certificate(io::certificate_from_json(*e.certificate, sys), sys, e.mode, mc_of(e));
    for (auto& s : curve.samples) s.certified = certified_lower_bound(cert, s.eps);
  }
  emit(e, io::curve_csv(curve));
  for (const auto& v : curve_violations(curve)) std::cerr << "check failed: " << v << "\n";
  return curve_violations(curve).empty() ? kOk : kCheckFailed;
}

int cmd_rd_dim(const Flags& f) {
  const Experiment e = load(f);
  require(e.t_grid.size() >= 2, "rd dim needs --t A..B with at least two points");
  const ShiftSystem sys = system_of(e);
  std::vector<double> eps;
  for (double t : e.t_grid) eps.push_back(std::exp2(-t));
  const RDCurve curve = rd_curve(sys, eps, L_or(e, {1}), e.jobs);
  const auto est = rdim_estimates(curve, e.tail);
  emit(e, json{{"system", sys.name()}, {"curve", io::curve_to_json(curve)}, {"rdim", io::to_json(est)}});
  return kOk;
}

int cmd_dim(const Flags& f) {
  const Experiment e = load(f);
  require(e.t_grid.size() >= 3, "dim needs --t A..B with at least three points");
  const ShiftSystem sys = system_of(e);
  const auto rep = dimension_report(sys, e.t_grid, L_or(e, {1}), e.tail, e.jobs);
  emit(e, json{{"system", sys.name()}, {"report", io::to_json(rep)}});
  return kOk;
}

int cmd_cover(const Flags& f) {
  const Experiment e = load(f);
  require(!e.eps.empty(), "need --t A..B or --eps");
  const ShiftSystem sys = system_of(e);
  json rows = json::array();
  for (double eps : e.eps) {
    json r = {{"eps", eps}, {"t", log2_inverse(eps)}};
    if (sys.symbolic()) {
      const auto c = alphabet_log2_cover(sys.alphabet(), eps);
      r["log2_cover"] = c.upper;
      r["method"] = "formula";
    } else {
      const auto c = covering_number(sys.space(), eps);
      r["lower"] = c.lower;
      r["upper"] = c.upper;
      r["exact"] = c.exact();
      r["method"] = to_string(c.method);
    }
    rows.push_back(r);
  }
  emit(e, json{{"alphabet_log2_size", alphabet_log2_size(sys.alphabet())}, {"rows", rows}});
  return kOk;
}

int cmd_mix_check(const Flags& f) {
  const Experiment e = load(f);
  const MeasureMixture mix = mixture_of(e);
  const auto Ls = L_or(e, {1, 2, 3});
  const auto eps = e.eps.empty() ? std::vector<double>{0.2, 0.1, 0.05} : e.eps;
  const auto curves = component_curves(mix, *std::max_element(Ls.begin(), Ls.end()), {}, e.jobs);
  json reports = json::array();
  bool ok = true;
  for (double x : eps) {
    const auto rep = mixture_formula_check(mix, curves, x, Ls, e.jobs);
    ok = ok && rep.ok;
    reports.push_back(io::to_json(rep));
  }
  emit(e, json{{"components", mix.size()}, {"weights", mix.weights()}, {"checks", reports}, {"ok", ok}});
  return ok ? kOk : kCheckFailed;
}

int cmd_mix_decompose(const Flags& f) {
  const Experiment e = load(f);
  require(e.t_grid.size() >= 2, "mix decompose needs --t A..B");
  const MeasureMixture mix = mixture_of(e);
  const auto Ls = L_or(e, {1});
  const auto rep = decomposition_experiment(mix, e.t_grid, Ls.front(), e.tail, e.jobs);
  emit(e, io::to_json(rep));
  return rep.upper_ok && rep.lower_ok ? kOk : kCheckFailed;
}

int cmd_cert_check(const Flags& f) {
  const Experiment e = load(f);
  require(e.certificate.has_value(), "cert check needs --cert FILE or a \"certificate\" entry");
  const ShiftSystem sys = system_of(e);
  auto cert = io::certificate_from_json(*e.certificate, sys);
  const auto rep = check_feasibility(cert, sys, e.mode, mc_of(e));
  json out = {{"system", sys.name()}, {"feasibility", io::to_json(rep)}};
  bool ok = rep.feasible;
  if (ok) {
    cert.verified = rep;
    json rows = json::array();
    for (double eps : e.eps) {
      const double bound = certified_lower_bound(cert, eps);
      json r = {{"eps", eps}, {"bound", bound}};
      try {
        const double rate = r_L(sys, cert.L, eps);
        r["r_L"] = rate;
        r["consistent"] = bound <= rate + kCertificateSlack;
        ok = ok && bound <= rate + kCertificateSlack;
      } catch (const InvalidInput&) {
        r["r_L"] = nullptr;  // block source too large
      }
      rows.push_back(r);
    }
    out["bounds"] = rows;
  }
  out["certificate"] = io::to_json(cert);
  out["ok"] = ok;
  emit(e, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_example(const Flags& f, const std::string& name, const std::string& growth, int m_max) {
  Experiment e = load(f, false);
  json out;
  bool ok = true;
  if (name == "section4") {
    require(growth == "linear" || growth == "exponential", "--growth must be linear or exponential");
    const int m = m_max > 0 ? m_max : (growth == "exponential" ? 2 : 3);
    const auto params = growth == "exponential" ? exponential_growth(m) : linear_growth(m);
    const auto rep = section4_report(params, e.jobs);
    out["mixture"] = io::mixture_to_json(build_section4_mixture(params));
    out["report"] = io::to_json(rep);
    ok = rep.sound && (growth == "exponential" || rep.increasing);
  } else if (name == "section5") {
    const auto s = default_schedule();
    std::optional<MonteCarloOptions> mc;
    if (e.mode == FeasibilityMode::kMonteCarlo) mc = mc_of(e);
    const auto rep = section5_report(s, mc);
    out["system"] = io::system_to_json(build_gapped_shift(s));
    out["report"] = io::to_json(rep);
    for (const auto& w : rep.windows) ok = ok && w.ok;
    for (const auto& p : rep.points)
      if (!p.truncation_flag) ok = ok && p.closed_form.feasible && (!p.monte_carlo || p.monte_carlo->feasible);
  } else if (name == "interleaved") {
    const auto [first, second] = build_interleaved_pair(default_schedule());
    const auto rep = interleaved_report(default_schedule(), std::nullopt, e.jobs);
    out["systems"] = json::array({io::system_to_json(first), io::system_to_json(second)});
    out["weights"] = {0.5, 0.5};
    out["report"] = io::to_json(rep);
  } else if (name == "discontinuity") {
    const int q = 4;
    const std::vector<int> ns = {1, 2};
    const double eps = e.eps.empty() ? 0.05 : e.eps.back();
    const auto rep = discontinuity_report(q, ns, L_or(e, {1, 2, 3}), eps);
    json systems = json::array();
    for (const auto& s : build_periodic_discontinuity_demo(q, ns)) systems.push_back(io::system_to_json(s));
    out["systems"] = systems;
    out["report"] = io::to_json(rep);
    ok = rep.ok;
  } else {
    throw InvalidInput("unknown example '" + name + "' (section4, section5, interleaved, discontinuity)");
  }
  emit(e, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_verify_all(const Flags& f) {
  Experiment e = load(f, false);
  acceptance::SuiteOptions opt;
  opt.seed = e.seed.value_or(7);
  opt.jobs = e.jobs;
  opt.mc_samples = e.samples;
  auto first = acceptance::run_suite(opt);
  const std::string text = acceptance::format_report(first);
  const auto second = acceptance::run_suite(opt);
  first.push_back(acceptance::determinism(text, acceptance::format_report(second), 0, 0));
  std::string report = "verify all (seed " + std::to_string(opt.seed) + ")\n" + acceptance::format_report(first);
  const bool ok = acceptance::all_pass(first);
  report += ok ? "all criteria passed\n" : "some criteria FAILED\n";
  emit(e, report);
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdimlab: rate distortion dimension experiments on finite shift systems"};
  app.require_subcommand(1);
  Flags f;
  std::string example_name, growth = "linear";
  int m_max = 0;

  auto add_common = [&](CLI::App* c, bool grid) {
    c->add_option("--system", f.system, "system JSON (or experiment config)");
    c->add_option("--config", f.config, "experiment config or mixture JSON");
    if (grid) {
      c->add_option("--t", f.t, "t range A..B, eps = 2^-t");
      c->add_option("--eps", f.eps, "explicit eps values")->delimiter(',');
      c->add_option("--L", f.L, "block lengths")->delimiter(',');
    }
    c->add_option("--out", f.out, "output path (default stdout)");
    c->add_option("--seed", f.seed, "random seed");
    c->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    c->add_option("--mode", f.mode, "feasibility mode: closedForm, exhaustive, monteCarlo");
    c->add_option("--samples", f.samples, "Monte Carlo samples per test point");
    c->add_option("--cert", f.cert, "certificate JSON");
    c->add_option("--tail", f.tail, "tail fraction for dimension estimates");
  };

  auto* rd = app.add_subcommand("rd", "rate distortion curves");
  rd->require_subcommand(1);
  auto* rd_curve_cmd = rd->add_subcommand("curve", "R(eps) as CSV: eps,t,R,L_used,certified_lower");
  auto* rd_dim_cmd = rd->add_subcommand("dim", "rate distortion dimension estimates");
  add_common(rd_curve_cmd, true);
  add_common(rd_dim_cmd, true);

  auto* mix = app.add_subcommand("mix", "mixtures");
  mix->require_subcommand(1);
  auto* mix_check = mix->add_subcommand("check", "allocation formula against direct block rates");
  auto* mix_dec = mix->add_subcommand("decompose", "dimension of a mixture against its components");
  add_common(mix_check, true);
  add_common(mix_dec, true);

  auto* cover = app.add_subcommand("cover", "covering numbers of the alphabet");
  add_common(cover, true);
  auto* dim = app.add_subcommand("dim", "metric mean dimension and rate distortion dimension");
  add_common(dim, true);

  auto* cert = app.add_subcommand("cert", "lower-bound certificates");
  cert->require_subcommand(1);
  auto* cert_check = cert->add_subcommand("check", "feasibility and certified bounds");
  add_common(cert_check, true);

  auto* example = app.add_subcommand("example", "built-in example systems with reports");
  example->add_option("name", example_name, "section4 | section5 | interleaved | discontinuity")->required();
  example->add_option("--growth", growth, "section4 growth: linear (g = 8m) or exponential (g = 3^m)");
  example->add_option("--m", m_max, "section4: number of cluster components");
  add_common(example, true);

  auto* verify = app.add_subcommand("verify", "acceptance suite");
  verify->require_subcommand(1);
  auto* verify_all = verify->add_subcommand("all", "run every acceptance criterion");
  add_common(verify_all, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*rd_curve_cmd) return cmd_rd_curve(f);
    if (*rd_dim_cmd) return cmd_rd_dim(f);
    if (*mix_check) return cmd_mix_check(f);
    if (*mix_dec) return cmd_mix_decompose(f);
    if (*cover) return cmd_cover(f);
    if (*dim) return cmd_dim(f);
    if (*cert_check) return cmd_cert_check(f);
    if (*example) return cmd_example(f, example_name, growth, m_max);
    if (*verify_all) return cmd_verify_all(f);
  } catch (const CertificateRejected& e) {
    std::cerr << "certificate rejected: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const ConvergenceError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  std::cerr << app.help();
  return kInvalid;
}
