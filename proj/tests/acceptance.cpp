// Acceptance run: one PASS/FAIL line per criterion; exit status is the verdict.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "clab/verify.hpp"
#include "oracles.hpp"

using namespace clab;
using oracle::Vec;

namespace {

// Berger targets straight from the closed-form metric at lambda^2 = 1/2:
// the Hopf-vertical plane has K = lambda^2, horizontal planes 4 - 3 lambda^2.
bool berger_targets() {
  auto g = [](const Vec& x) { return oracle::berger_clifford(x, 0.5); };
  Vec x(3);
  x << 0.6, 0.3, -1.1;
  double c2 = std::pow(std::cos(x(0)), 2), s2 = std::pow(std::sin(x(0)), 2);
  Vec d0 = Vec::Unit(3, 0), V(3), X(3);
  V << 0, 1, 1;
  X << 0, 1, -c2 / s2;
  double kv = oracle::sectional_fd(g, x, V, d0), kh = oracle::sectional_fd(g, x, d0, X);
  std::printf("# Berger oracle: vertical %.6f (target 0.5), horizontal %.6f (target 2.5)\n", kv, kh);
  return std::abs(kv - 0.5) < 1e-4 && std::abs(kh - 2.5) < 1e-4;
}

}  // namespace

int main(int argc, char** argv) {
  VerifyOptions o;
  if (const char* s = std::getenv("CLAB_BUDGET_SCALE")) o.budget_scale = std::atof(s);
  if (argc > 1) o.budget_scale = std::atof(argv[1]);
  std::cout << tolerance_table(scaled_tolerances(o.budget_scale), o.budget_scale);
  if (!berger_targets()) {
    std::printf("FAIL Berger oracle targets\n");
    return 1;
  }
  VerifyReport rep = verify_all(o);
  for (const auto& c : rep.criteria) std::cout << verdict_line(c) << std::endl;
  std::printf("%s overall\n", rep.pass() ? "PASS" : "FAIL");
  return rep.pass() ? 0 : 1;
}
