// Acceptance suite: runs every criterion of the verification matrix at its
// pinned tolerance and prints one pass/fail line per criterion, plus the
// individual gate lines. Exit code 0 only when everything holds.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "thinfilm/verify.hpp"

using namespace thinfilm;

namespace {

const std::map<std::string, std::string> kCriterionNames = {
    {"C1", "mass conservation, 1e5-step coupled run"},
    {"C2", "energy dissipation inequality"},
    {"C3", "entropy dissipation inequality"},
    {"C4", "local energy estimates (weighted and w-form)"},
    {"C5", "pointwise slope bound, zero violations"},
    {"C6", "interpolation inequality, 1000 random functions"},
    {"C7", "decoupled source-type convergence ladder"},
    {"C8", "support growth exponent in [0.28, 0.38]"},
    {"C9", "gap persistence scaling over r0 doublings"},
    {"C10", "waiting time: detection, refinement, criterion"},
    {"C11", "second-moment barrier and energy decay, long run"},
    {"C12", "byte-identical summaries across repeated runs"},
};

std::string criterion_of(const std::string& gate_id) {
  return gate_id.substr(0, gate_id.find('.'));
}

}  // namespace

int main() {
  const char* dir = TF_SCENARIO_DIR;
  SuiteResult res = run_acceptance_matrix(dir, 1234, true);

  std::map<std::string, bool> criterion_pass;
  for (const GateResult& g : res.gates) {
    const std::string c = criterion_of(g.id);
    auto [it, inserted] = criterion_pass.emplace(c, g.pass);
    if (!inserted) it->second = it->second && g.pass;
  }

  for (const auto& [c, name] : kCriterionNames) {
    auto it = criterion_pass.find(c);
    const bool pass = it != criterion_pass.end() && it->second;
    std::printf("%s  %-4s %s\n", pass ? "PASS" : "FAIL", c.c_str(), name.c_str());
    for (const GateResult& g : res.gates) {
      if (criterion_of(g.id) != c) continue;
      std::printf("  %s  %-34s value=%.6g bound=%.6g margin=%.6g\n",
                  g.pass ? "pass" : "FAIL", g.id.c_str(), g.value, g.bound, g.margin);
    }
  }
  std::printf("%s\n", res.all_pass ? "ACCEPTANCE: all criteria satisfied"
                                   : "ACCEPTANCE: FAILURES PRESENT");
  return res.all_pass ? 0 : 1;
}
