#pragma once
// Riemannian submersions in charts: horizontal projection, O'Neill's A-tensor,
// horizontal lifts and the O'Neill curvature identity.

#include <functional>
#include <memory>

#include "clab/curvature.hpp"
#include "clab/metric_field.hpp"

namespace clab {

class Submersion {
 public:
  virtual ~Submersion() = default;
  virtual const MetricPtr& total_metric() const = 0;
  virtual const MetricPtr& base_metric() const = 0;

  // Columns span the vertical space at a total-space chart point.
  virtual Mat vertical(int patch, const Vec& x) const = 0;
  virtual MatT<Dual1> vertical(int patch, const VecT<Dual1>& x) const = 0;

  // Projection into the chart `base_patch` of the base.
  virtual Vec project(int patch, const Vec& x, int base_patch) const = 0;
  virtual VecT<Dual1> project(int patch, const VecT<Dual1>& x, int base_patch) const = 0;

  const ManifoldPtr& total() const { return total_metric()->manifold(); }
  const ManifoldPtr& base() const { return base_metric()->manifold(); }
  Point project(const Point& p) const;
  // Differential of the projection, into the chart of project(p).
  Mat differential(const Point& p, int base_patch) const;
};

template <class Derived>
class SubmersionT : public Submersion {
 public:
  SubmersionT(MetricPtr total, MetricPtr base) : total_(std::move(total)), base_(std::move(base)) {}
  const MetricPtr& total_metric() const override { return total_; }
  const MetricPtr& base_metric() const override { return base_; }
  Mat vertical(int p, const Vec& x) const override { return self().template vert<double>(p, x); }
  MatT<Dual1> vertical(int p, const VecT<Dual1>& x) const override { return self().template vert<Dual1>(p, x); }
  Vec project(int p, const Vec& x, int b) const override { return self().template proj<double>(p, x, b); }
  VecT<Dual1> project(int p, const VecT<Dual1>& x, int b) const override {
    return self().template proj<Dual1>(p, x, b);
  }
  using Submersion::project;

 private:
  MetricPtr total_, base_;
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

using SubmersionPtr = std::shared_ptr<const Submersion>;

// P_h = I - V (V^T G V)^{-1} V^T G
template <class T>
MatT<T> horizontal_projector(const MatT<T>& G, const MatT<T>& V) {
  const Eigen::Index n = G.rows();
  MatT<T> I = MatT<T>::Identity(n, n);
  if (V.cols() == 0) return I;
  MatT<T> VtG = V.transpose() * G;
  MatT<T> M = VtG * V;
  return I - V * solve<T>(M, VtG);
}

Mat horizontal_projector(const Submersion& s, const Point& p);

enum class Extension { Projected, Perturbed };

// What the A-tensor needs: a metric and a vertical frame on the same charts.
struct VerticalFrame {
  const MetricField* metric = nullptr;
  std::function<Mat(int, const Vec&)> v0;
  std::function<MatT<Dual1>(int, const VecT<Dual1>&)> v1;
};
VerticalFrame frame_of(const Submersion& s);
Vec a_tensor(const VerticalFrame& f, const Point& p, const Vec& X, const Vec& Y, Extension ext = Extension::Projected);

// A_X Y = 1/2 [X~, Y~]^v at p, X and Y horizontal.
Vec a_tensor(const Submersion& s, const Point& p, const Vec& X, const Vec& Y,
             Extension ext = Extension::Projected);
// |A_X Y| difference between the two extension schemes.
double a_tensor_extension_gap(const Submersion& s, const Point& p, const Vec& X, const Vec& Y);

// Horizontal vector at p that projects to v (given in the chart of project(p)).
Vec horizontal_lift(const Submersion& s, const Point& p, const Vec& v_base);

struct ONeillTerms {
  double k_base = 0;   // sectional curvature downstairs
  double k_total = 0;  // sectional curvature of the lifted plane
  double a_norm2 = 0;  // |A_X Y|^2 / Gram
  double residual = 0; // k_base - (k_total + 3 a_norm2)
};
// v, w are tangent vectors at project(p) in the chart of project(p).
ONeillTerms oneill_residual(const Submersion& s, const Point& p, const Vec& v, const Vec& w);

// Registry submersions.
SubmersionPtr hopf_submersion(std::shared_ptr<const Sphere> s3, std::shared_ptr<const Sphere> s2);
// Flat unit T^n -> T^(n-k) forgetting the last k coordinates.
SubmersionPtr flat_product_submersion(int n = 3, int k = 1);

// Smallest singular value of the projection differential over the given points.
double submersion_rank_margin(const Submersion& s, const std::vector<Point>& pts);

}  // namespace clab
