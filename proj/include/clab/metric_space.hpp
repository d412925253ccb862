#pragma once

#include <optional>
#include <string>

#include "clab/linalg.hpp"

namespace clab {

struct FiniteMetricSpace {
  Mat d;
  int size() const { return static_cast<int>(d.rows()); }
  double operator()(int i, int j) const { return d(i, j); }
};

struct MetricViolation {
  std::string kind;  // "shape", "diagonal", "symmetry", "negative", "triangle"
  int i = -1, j = -1, k = -1;
  double amount = 0.0;
};

// Empty optional means PASS.
std::optional<MetricViolation> validate_metric(const FiniteMetricSpace& D, double sym_tol = 1e-12,
                                               double tri_tol = 1e-9);

double diameter_estimate(const FiniteMetricSpace& D);

}  // namespace clab
