#include <gtest/gtest.h>

#include "rdimlab/io.hpp"
#include "rdimlab_verify/acceptance.hpp"

using namespace rdimlab;

namespace {

const std::string kConfigs = RDIMLAB_CONFIGS;

}  // namespace

TEST(Io, ShortFormIsIid) {
  auto sys = io::system_from_json(io::read_json_file(kConfigs + "/bern05.json"));
  EXPECT_EQ(sys.name(), "bern05");
  EXPECT_EQ(sys.alphabet_size(), 2u);
  EXPECT_DOUBLE_EQ(sys.single_letter_law()[1], 0.5);
}

TEST(Io, SystemRoundTrip) {
  const std::vector<ShiftSystem> systems = {
      ShiftSystem::bernoulli(0.3, "b"),
      ShiftSystem::create(ClusterAlphabet{5, 0.25}, UniformModel{}, 1, 0.5, "cluster"),
      ShiftSystem::create(GappedAlphabet{GapSchedule{{2, 12}, {5, 50}}, 20}, UniformModel{}, 1, 0.5, "gapped"),
      ShiftSystem::create(ShiftSystem::binary_alphabet(),
                          MarkovModel{Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}}), Distribution::create({2.0 / 3, 1.0 / 3})}),
      ShiftSystem::create(FiniteMetricSpace::line_grid(3, 0.5), PeriodicModel{{0, 1, 2, 1}}),
  };
  for (const auto& s : systems) {
    const auto j = io::system_to_json(s);
    const auto back = io::system_from_json(io::json::parse(j.dump()));
    EXPECT_EQ(io::system_to_json(back).dump(), j.dump());
  }
}

TEST(Io, MarkovStationaryComputed) {
  auto j = io::json::parse(R"({"alphabet": {"dist": [[0, 1], [1, 0]]},
                              "measure": {"type": "markov", "transition": [[0.9, 0.1], [0.2, 0.8]]}})");
  auto sys = io::system_from_json(j);
  EXPECT_NEAR(sys.single_letter_law()[0], 2.0 / 3, 1e-12);
}

TEST(Io, Errors) {
  EXPECT_THROW(io::read_json_file(kConfigs + "/missing.json"), InvalidInput);
  EXPECT_THROW(io::system_from_json(io::json::parse(R"({"alphabet": {"type": "torus"}})")), InvalidInput);
  EXPECT_THROW(io::system_from_json(io::json::parse(R"({"dist": [[0, 1], [1, 0]]})")), InvalidInput);
  try {
    io::mixture_from_json(io::read_json_file(kConfigs + "/bad.json"));
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("sum to 0.9"), std::string::npos);
  }
}

TEST(Io, BundledMixtureConfigsMatchSuite) {
  for (const auto& [name, mix] : acceptance::bundled_mixtures()) {
    const auto file = io::mixture_from_json(io::read_json_file(kConfigs + "/mixture_" + name + ".json"));
    ASSERT_EQ(file.size(), mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
      EXPECT_DOUBLE_EQ(file.weights()[i], mix.weights()[i]);
      const auto a = file.components()[i].single_letter_law(), b = mix.components()[i].single_letter_law();
      for (std::size_t x = 0; x < a.size(); ++x) EXPECT_DOUBLE_EQ(a[x], b[x]);
      EXPECT_TRUE(file.components()[i].space() == mix.components()[i].space());
    }
  }
}

TEST(Io, CsvFormat) {
  RDCurve c;
  c.samples.push_back({0.25, 0.188721876, 1, {}});
  c.samples.push_back({0.125, 0.456435556, 2, 0.1});
  EXPECT_EQ(io::curve_csv(c), "eps,t,R,L_used,certified_lower\n0.25,2,0.188721876,1,\n0.125,3,0.456435556,2,0.1\n");
}

TEST(Io, CertificateJson) {
  auto sys = ShiftSystem::create(ClusterAlphabet{8, 1.0}, UniformModel{});
  auto cert = io::certificate_from_json(io::json::parse(R"({"type": "cluster", "m": 1, "g": 8})"), sys);
  cert = verify_certificate(cert, sys, FeasibilityMode::kClosedForm);
  const auto j = io::to_json(cert);
  EXPECT_EQ(j["bound"]["type"], "separated");
  EXPECT_TRUE(j["feasibility"]["feasible"].get<bool>());
  EXPECT_EQ(j["feasibility"]["mode"], "closedForm");
}
