#pragma once
// The acceptance suite: one function per criterion, rows with explicit limits so
// every verdict can be recomputed from the CSV alone.

#include <cstdint>
#include <string>
#include <vector>

namespace clab {

struct Tolerances {
  double sphere_K = 1e-4;        // |K - 1| on the unit S^3
  double flat_K = 1e-7;          // |K| on flat T^3
  double riemann_symmetry = 1e-7;
  double oneill = 1e-2;          // |4 - (1 + 3|A|^2)|
  double cheeger_rel = 1e-3;     // direct vs three-term formula
  double nondecrease = 1e-8;     // RHS - K(g) >= -this
  double berger_rel = 0.02;      // scan extremes vs {0.5, 2.5}
  double collapse_K = 4.05;
  double diameter_rel = 0.1;
  double gh_noise = 0.05;
  double gh_limit = 0.35;        // bound at delta = 0.01
  double ell_lo = 1.7, ell_hi = 2.3;
  double k_growth = 10.0;
  double gh_sound = 1e-12;
  double groupoid_metric = 1e-9;
  double groupoid_ii = 1e-8;
  double groupoid_rhs = 1e-3;
  // seconds
  double time_curvature = 30, time_cheeger = 180, time_singular = 600;
};

// Budget scale F < 1 loosens only the sampling-limited tolerances:
//   berger_rel, diameter_rel x 1/sqrt(F) (capped at 2x), gh_limit x 1/sqrt(F) (capped at 2x),
//   gh_noise x 1/sqrt(F) (capped at 2x). Exact-arithmetic tolerances never change.
Tolerances scaled_tolerances(double budget_scale);
std::string tolerance_table(const Tolerances& t, double budget_scale);

struct VerifyOptions {
  std::uint64_t seed = 1;
  double budget_scale = 1.0;
  bool determinism = true;  // criterion 8 reruns 1-7
};

struct VerifyRow {
  int criterion = 0;
  std::string quantity;
  std::string parameter;
  double value = 0;
  double lo = 0, hi = 0;  // pass iff lo <= value <= hi
  bool pass() const { return lo <= value && value <= hi; }
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<VerifyRow> rows;
  double seconds = 0;
  double time_limit = 0;  // 0 = none
  bool pass() const;
};

struct VerifyReport {
  std::vector<CriterionResult> criteria;
  Tolerances tol;
  VerifyOptions options;
  bool pass() const;
};

CriterionResult verify_criterion(int id, const VerifyOptions& opt, const Tolerances& tol);
VerifyReport verify_all(const VerifyOptions& opt);

// criterion,quantity,parameter,value,lo,hi,pass with 17 significant digits; no timings
std::string verify_csv(const std::vector<CriterionResult>& criteria);
std::string verdict_line(const CriterionResult& c);

// %.17g
std::string format_double(double x);

}  // namespace clab
