#pragma once
// Cheeger deformation of a G-invariant metric: the tensor Ch_t, the deformed
// metric g_t, the submersion G x M -> M it comes from, and the curvature
// right-hand side built from that submersion.

#include "clab/action.hpp"
#include "clab/submersion.hpp"

namespace clab {

class CheegerContext {
 public:
  // Validates isometry of the action on a deterministic sample.
  CheegerContext(ActionPtr action, MetricPtr g, double t, double isometry_tol = 1e-9);

  const Action& action() const { return *action_; }
  const ActionPtr& action_ptr() const { return action_; }
  const MetricPtr& metric() const { return g_; }
  const LieGroup& group() const { return action_->group(); }
  double t() const { return t_; }
  CheegerContext with_t(double t) const;

 private:
  ActionPtr action_;
  MetricPtr g_;
  double t_;
};

// Ch_t(p) v = ((I + tS)^{-1} x)* + xi  for v = X* + xi.
Vec cheeger_tensor(const CheegerContext& c, const Point& p, const Vec& v);
// Ch_t^{-1}(p) v = ((I + tS) x)* + xi.
Vec cheeger_tensor_inverse(const CheegerContext& c, const Point& p, const Vec& v);

// g_t = G - t G E (Q + t E^T G E)^{-1} E^T G, E = action fields.
MetricPtr deformed_metric(const CheegerContext& c);

// (G x M, (1/t) Q + g) -> M, (a, p) -> mu(a^{-1}, p). Requires t > 0.
SubmersionPtr cheeger_submersion(const CheegerContext& c);
// Product-chart point (identity, p).
Point cheeger_total_point(const CheegerContext& c, const Point& p);
// Horizontal lift at (e, p) of v: (-t S x, v); it projects to Ch_t^{-1} v.
Vec cheeger_lift(const CheegerContext& c, const Point& p, const Vec& v);

struct RhsCurvature {
  double group_term = 0;     // t^3 (1/4)|[Sx, Sy]|_Q^2
  double base_term = 0;      // g(R(v,w)w, v)
  double a_term = 0;         // 3 |A|^2
  double unnormalized = 0;   // sum of the three
  double gram = 0;           // Gram determinant of (Ch^{-1}v, Ch^{-1}w) in g_t
  double normalized = 0;     // unnormalized / gram
};
RhsCurvature rhs_curvature(const CheegerContext& c, const Point& p, const Vec& v, const Vec& w);

// Direct sectional curvature of g_t on the plane (Ch^{-1} v, Ch^{-1} w).
double lhs_curvature(const CheegerContext& c, const Point& p, const Vec& v, const Vec& w);

}  // namespace clab
