#pragma once
// Metric evaluators on chart coordinates. Every field can be evaluated on plain
// doubles and on dual scalars, which is how curvature gets exact derivatives.

#include <memory>
#include <string>

#include "clab/manifold.hpp"

namespace clab {

class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual const ManifoldPtr& manifold() const = 0;
  virtual std::string describe() const = 0;
  int dim() const { return manifold()->dim(); }

  virtual Mat eval(int patch, const Vec& x) const = 0;
  virtual MatT<Dual1> eval(int patch, const VecT<Dual1>& x) const = 0;
  virtual MatT<HyperDual> eval(int patch, const VecT<HyperDual>& x) const = 0;

  Mat operator()(const Point& p) const { return eval(p.patch, p.coords); }
};

using MetricPtr = std::shared_ptr<const MetricField>;

// Helper: Derived provides `template <class T> MatT<T> evaluate(int, const VecT<T>&) const`.
template <class Derived>
class MetricFieldT : public MetricField {
 public:
  explicit MetricFieldT(ManifoldPtr m) : m_(std::move(m)) {}
  const ManifoldPtr& manifold() const override { return m_; }
  Mat eval(int patch, const Vec& x) const override { return self().template evaluate<double>(patch, x); }
  MatT<Dual1> eval(int patch, const VecT<Dual1>& x) const override {
    return self().template evaluate<Dual1>(patch, x);
  }
  MatT<HyperDual> eval(int patch, const VecT<HyperDual>& x) const override {
    return self().template evaluate<HyperDual>(patch, x);
  }

 protected:
  ManifoldPtr m_;

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Checked evaluation: point validity, symmetry, positive-definiteness.
Mat metric_eval(const MetricField& field, const Point& p);

// Built-in fields.
MetricPtr flat_metric(ManifoldPtr m, double scale = 1.0);
MetricPtr constant_metric(ManifoldPtr m, const Mat& G);
// Round metric of the sphere of radius r, in stereographic charts.
MetricPtr round_sphere_metric(std::shared_ptr<const Sphere> s, double radius = 1.0);
MetricPtr clifford_round_metric(std::shared_ptr<const CliffordS3> m);
MetricPtr poincare_metric(std::shared_ptr<const DiskPatch> m);
MetricPtr scaled_metric(MetricPtr g, double factor);  // factor * g
// a*g1 (+) b*g2 on the product manifold.
MetricPtr product_metric(std::shared_ptr<const ProductManifold> m, MetricPtr g1, MetricPtr g2,
                         double a = 1.0, double b = 1.0);

}  // namespace clab
