#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "rdimlab/core.hpp"
#include "rdimlab_verify/oracles.hpp"

namespace {

const std::string kCli = RDIMLAB_CLI;
const std::string kConfigs = RDIMLAB_CONFIGS;

struct Run {
  std::string out;
  int code = -1;
};

// Runs the CLI with stderr folded into the captured output.
Run cli(const std::string& args) {
  Run r;
  FILE* p = popen((kCli + " " + args + " 2>&1").c_str(), "r");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return testing::TempDir() + name; }

}  // namespace

TEST(Cli, RdCurveBernoulli) {
  const std::string out = tmp("curve.csv");
  auto r = cli("rd curve --system " + kConfigs + "/bern05.json --t 2..10 --L 1,2,3 --out " + out);
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "eps,t,R,L_used,certified_lower");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    double eps = 0, t = 0, R = 0;
    int L = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%d,", &eps, &t, &R, &L), 4) << line;
    EXPECT_EQ(t, rows + 1);
    EXPECT_NEAR(R, 1.0 - rdimlab::oracle::h2(std::exp2(-t)), 1e-6);
    EXPECT_EQ(line.back(), ',');  // no certificate given
  }
  EXPECT_EQ(rows, 9);
  // Identical config, identical bytes.
  const std::string again = tmp("curve2.csv");
  ASSERT_EQ(cli("rd curve --system " + kConfigs + "/bern05.json --t 2..10 --L 1,2,3 --out " + again).code, 0);
  EXPECT_EQ(slurp(out), slurp(again));
}

TEST(Cli, BadMixtureWeights) {
  auto r = cli("mix check --config " + kConfigs + "/bad.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("weights sum to 0.9"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("rd curve --system " + kConfigs + "/bern05.json --t 10..2").code, 2);
  EXPECT_EQ(cli("rd curve --system /nonexistent.json --t 2..3").code, 2);
  EXPECT_EQ(cli("example nowhere").code, 2);
  EXPECT_EQ(cli("cert check --system " + kConfigs + "/gapped.json --cert " + kConfigs +
                "/cert_gapped_k2.json --mode monteCarlo --eps 0.01")
                .code,
            2);  // monteCarlo without a seed
}

TEST(Cli, MixCheckBundled) {
  auto r = cli("mix check --config " + kConfigs + "/mixture_binary.json --eps 0.1 --L 1,2");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"ok\": true"), std::string::npos);
}

TEST(Cli, CertCheckExperimentConfig) {
  auto r = cli("cert check --config " + kConfigs + "/cert_experiment.json");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"monteCarlo\""), std::string::npos);
  EXPECT_NE(r.out.find("\"consistent\": true"), std::string::npos);
}

TEST(Cli, CertificateCurveColumn) {
  auto r = cli("rd curve --system " + kConfigs + "/gapped.json --t 20..24 --cert " + kConfigs +
               "/cert_gapped_k2.json");
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) EXPECT_NE(line.back(), ',') << line;
}

TEST(Cli, Examples) {
  for (const char* name : {"section4", "section5", "interleaved", "discontinuity"}) {
    auto r = cli(std::string("example ") + name);
    EXPECT_EQ(r.code, 0) << name << "\n" << r.out;
    EXPECT_NE(r.out.find("\"report\""), std::string::npos) << name;
  }
  auto expo = cli("example section4 --growth exponential");
  EXPECT_EQ(expo.code, 0) << expo.out;
}

TEST(Cli, CoverAndDimension) {
  auto c = cli("cover --system " + kConfigs + "/gapped.json --t 1..30");
  EXPECT_EQ(c.code, 0) << c.out;
  auto d = cli("rd dim --system " + kConfigs + "/bern05.json --t 2..12");
  EXPECT_EQ(d.code, 0) << d.out;
  auto m = cli("dim --system " + kConfigs + "/bern05.json --t 2..8");
  EXPECT_EQ(m.code, 0) << m.out;
  auto dec = cli("mix decompose --config " + kConfigs + "/mixture_line3.json --t 1..8");
  EXPECT_EQ(dec.code, 0) << dec.out;
}

TEST(Cli, ExperimentConfigWritesOut) {
  const std::string dir = testing::TempDir();
  auto r = cli("rd curve --config " + kConfigs + "/markov_curve.json --out " + dir + "markov.csv");
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream in(slurp(dir + "markov.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 7);
}
