// Acceptance runner: one PASS/FAIL line per criterion. Criteria 1-9 run in
// process; criterion 10 runs `rdimlab verify all --seed 7` twice through the
// CLI given as the first argument and compares the bytes.

#include <array>
#include <cstdio>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "rdimlab_verify/acceptance.hpp"

namespace {

std::pair<std::string, int> run(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return {"", -1};
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rdimlab::acceptance;
  SuiteOptions opt;
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    results.push_back(c(opt));
    std::cout << format_report({results.back()}) << std::flush;
  }
  if (argc > 1) {
    const std::string cmd = std::string(argv[1]) + " verify all --seed 7";
    const auto [a, ca] = run(cmd);
    const auto [b, cb] = run(cmd);
    results.push_back(determinism(a, b, ca, cb));
    if (ca != 0) std::cout << "verify all exited with " << ca << "\n" << a;
  } else {
    results.push_back(determinism(format_report(run_suite(opt)), format_report(run_suite(opt)), 0, 0));
  }
  std::cout << format_report({results.back()});
  const bool ok = all_pass(results);
  std::cout << (ok ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << "\n";
  return ok ? 0 : 1;
}
