#pragma once
// Isometric actions of compact groups on the built-in manifolds.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "clab/lie.hpp"
#include "clab/metric_field.hpp"

namespace clab {

class Action {
 public:
  Action(LieGroupPtr G, ManifoldPtr M, std::string id) : G_(std::move(G)), M_(std::move(M)), id_(std::move(id)) {}
  virtual ~Action() = default;

  const LieGroup& group() const { return *G_; }
  const LieGroupPtr& group_ptr() const { return G_; }
  const ManifoldPtr& manifold() const { return M_; }
  const std::string& registry_id() const { return id_; }

  // mu(g, x) for x in chart `patch`, returned in chart `out_patch`.
  virtual Vec act(const Vec& g, int patch, const Vec& x, int out_patch) const = 0;
  virtual VecT<Dual1> act(const VecT<Dual1>& g, int patch, const VecT<Dual1>& x, int out_patch) const = 0;
  virtual VecT<HyperDual> act(const VecT<HyperDual>& g, int patch, const VecT<HyperDual>& x, int out_patch) const = 0;
  virtual VecT<HyperDual3> act(const VecT<HyperDual3>& g, int patch, const VecT<HyperDual3>& x,
                               int out_patch) const = 0;

  Point act(const Vec& g, const Point& p) const;

  // Action fields X*(p) = d/ds mu(exp(s x), p) at s = 0, in p's chart. Columns of fields() are E_i*.
  template <class T>
  VecT<T> field(const Vec& x, int patch, const VecT<T>& coords) const {
    const int k = G_->dim();
    using D = Dual<T>;
    VecT<D> xs(k);
    for (int i = 0; i < k; ++i) xs(i) = D(T(0.0), T(x(i)));
    VecT<D> c(coords.size());
    for (Eigen::Index i = 0; i < coords.size(); ++i) c(i) = D(coords(i), T(0.0));
    VecT<D> y = act(G_->exp<D>(xs), patch, c, patch);
    VecT<T> out(coords.size());
    for (Eigen::Index i = 0; i < coords.size(); ++i) out(i) = y(i).d;
    return out;
  }
  template <class T>
  MatT<T> fields(int patch, const VecT<T>& coords) const {
    const int k = G_->dim();
    MatT<T> E(coords.size(), k);
    for (int i = 0; i < k; ++i) E.col(i) = field<T>(Vec::Unit(k, i), patch, coords);
    return E;
  }
  Vec action_field(const Vec& x, const Point& p) const { return field<double>(x, p.patch, p.coords); }
  Mat action_fields(const Point& p) const { return fields<double>(p.patch, p.coords); }

 private:
  LieGroupPtr G_;
  ManifoldPtr M_;
  std::string id_;
};

using ActionPtr = std::shared_ptr<const Action>;

// Derived provides `template <class T> VecT<T> apply(const VecT<T>& g, int patch, const VecT<T>& x, int out) const`.
template <class Derived>
class ActionT : public Action {
 public:
  using Action::Action;
  using Action::act;
  Vec act(const Vec& g, int p, const Vec& x, int o) const override { return self().template apply<double>(g, p, x, o); }
  VecT<Dual1> act(const VecT<Dual1>& g, int p, const VecT<Dual1>& x, int o) const override {
    return self().template apply<Dual1>(g, p, x, o);
  }
  VecT<HyperDual> act(const VecT<HyperDual>& g, int p, const VecT<HyperDual>& x, int o) const override {
    return self().template apply<HyperDual>(g, p, x, o);
  }
  VecT<HyperDual3> act(const VecT<HyperDual3>& g, int p, const VecT<HyperDual3>& x, int o) const override {
    return self().template apply<HyperDual3>(g, p, x, o);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Registry.
ActionPtr hopf_action(std::shared_ptr<const Sphere> s3);                        // e^{i th}(z1, z2)
ActionPtr weighted_circle_action(std::shared_ptr<const Sphere> s3, int p, int q);  // (e^{ip th} z1, e^{iq th} z2)
ActionPtr torus_on_s3_action(std::shared_ptr<const Sphere> s3);                 // (e^{i a} z1, e^{i b} z2)
ActionPtr rotation_s2_action(std::shared_ptr<const Sphere> s2);                 // rotation about the x3 axis
ActionPtr torus_translation_action(std::shared_ptr<const FlatTorus> tk);       // x -> x + theta
ActionPtr su2_left_action(std::shared_ptr<const Sphere> s3);                   // q . p in unit quaternions
ActionPtr trivial_action(LieGroupPtr G, ManifoldPtr M);                        // mu(g, x) = x

// Q-self-adjoint operator with Q(S x, y) = g(X*, Y*).
Mat shape_tensor(const Action& A, const MetricField& g, const Point& p);
Mat gram_of_fields(const Action& A, const MetricField& g, const Point& p);

struct TangentSplit {
  Vec tangent;  // X*(p)
  Vec normal;   // xi, g-orthogonal to the orbit
  Vec x;        // least-Q-norm algebra preimage of the tangent part
};
TangentSplit split_tangent(const Action& A, const MetricField& g, const Point& p, const Vec& v);
// Same splitting for explicit data: E = fields, G = metric, Q = algebra inner product.
TangentSplit split_tangent(const Mat& E, const Mat& G, const Mat& Q, const Vec& v);

std::vector<Vec> group_sweep(const LieGroup& G, int count, std::uint64_t seed);
std::vector<Point> orbit_sample(const Action& A, const Point& p, int count, std::uint64_t seed = 0);

// max over (p, g) of |D mu_g^T g(mu_g p) D mu_g - g(p)|, relative to max(1, |g(p)|).
double isometry_check(const Action& A, const MetricField& g, const std::vector<Point>& samples,
                      const std::vector<Vec>& group_samples);
// Jacobian of x -> mu(g, x) from p's chart to the chart of mu(g, p).
Mat action_jacobian(const Action& A, const Vec& g, const Point& p, int out_patch);

}  // namespace clab
