#pragma once
// Compact Lie groups used by the actions: tori and SU(2).
//
// su(2) basis: e1, e2, e3 = quaternion units i, j, k, so [e_a, e_b] = 2 eps_abc e_c.
// SU(2) elements are stored as (x, y, z, w) = w + x i + y j + z k.
// exp(pi e1) = -1 (the central element); its square is the identity.

#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "clab/manifold.hpp"
#include "clab/metric_field.hpp"

namespace clab {

enum class GroupKind { Torus, SU2 };

class LieGroup {
 public:
  static LieGroup torus(int k, double period = 2 * std::numbers::pi, Mat Q = Mat());
  static LieGroup su2(double q_scale = 1.0);
  static LieGroup trivial();  // zero-dimensional torus

  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Mat& Q() const { return Q_; }
  std::string registry_id() const { return id_; }
  double period() const { return period_; }
  // c^k_ij stored at c[(k * dim + i) * dim + j]
  double c(int k, int i, int j) const { return c_[(k * dim_ + i) * dim_ + j]; }

  Vec bracket(const Vec& x, const Vec& y) const;
  double q_inner(const Vec& x, const Vec& y) const;
  double q_norm(const Vec& x) const;
  // (1/4) |[a,b]|_Q^2
  double biinvariant_sec_term(const Vec& a, const Vec& b) const;

  double jacobi_residual() const;
  double ad_invariance_residual() const;
  double antisymmetry_residual() const;

  int element_size() const { return kind_ == GroupKind::SU2 ? 4 : dim_; }

  template <class T> VecT<T> identity() const {
    VecT<T> e = VecT<T>::Zero(element_size());
    if (kind_ == GroupKind::SU2) e(3) = T(1.0);
    return e;
  }

  template <class T> VecT<T> multiply(const VecT<T>& a, const VecT<T>& b) const {
    if (kind_ == GroupKind::Torus) return a + b;
    VecT<T> r(4);
    r(0) = a(3) * b(0) + b(3) * a(0) + a(1) * b(2) - a(2) * b(1);
    r(1) = a(3) * b(1) + b(3) * a(1) + a(2) * b(0) - a(0) * b(2);
    r(2) = a(3) * b(2) + b(3) * a(2) + a(0) * b(1) - a(1) * b(0);
    r(3) = a(3) * b(3) - a(0) * b(0) - a(1) * b(1) - a(2) * b(2);
    return r;
  }

  template <class T> VecT<T> inverse(const VecT<T>& a) const {
    if (kind_ == GroupKind::Torus) return -a;
    VecT<T> r = -a;
    r(3) = a(3);
    return r;
  }

  template <class T> VecT<T> exp(const VecT<T>& x) const {
    if (kind_ == GroupKind::Torus) return x;
    T r2 = x(0) * x(0) + x(1) * x(1) + x(2) * x(2);
    T c, sc;
    if (real(r2) < 1e-8) {
      c = 1.0 - r2 / 2.0 + r2 * r2 / 24.0;
      sc = 1.0 - r2 / 6.0 + r2 * r2 / 120.0;
    } else {
      T r = sqrt(r2);
      c = cos(r);
      sc = sin(r) / r;
    }
    VecT<T> q(4);
    q << sc * x(0), sc * x(1), sc * x(2), c;
    return q;
  }

  // Reduce angles, renormalize quaternions.
  Vec normalize(const Vec& g) const;
  double element_distance(const Vec& a, const Vec& b) const;
  bool is_valid(const Vec& g, double tol = 1e-12) const;

  // The group as a manifold with charts, and the left-invariant metric from Q.
  const ManifoldPtr& manifold() const { return manifold_; }
  template <class T> VecT<T> element_from_chart(int patch, const VecT<T>& a) const {
    if (kind_ == GroupKind::Torus) return a;
    return Sphere::to_embedding<T>(patch, a);
  }
  template <class T> VecT<T> chart_from_element(int patch, const VecT<T>& g) const {
    if (kind_ == GroupKind::Torus) return g;
    return Sphere::from_embedding<T>(patch, g);
  }
  Point chart_point(const Vec& g) const;
  Vec element_at(const Point& p) const { return element_from_chart<double>(p.patch, p.coords); }
  // Metric scale * Q transported by left translations, in the group charts.
  MetricPtr left_invariant_metric(double scale = 1.0) const;

  // Left-trivialized chart derivative: columns are the algebra vectors g^{-1} d g / d a_m.
  template <class T> MatT<T> left_jacobian(int patch, const VecT<T>& a) const {
    const int n = dim_;
    MatT<T> J(n, n);
    if (kind_ == GroupKind::Torus) {
      J = MatT<T>::Identity(n, n);
      return J;
    }
    VecT<T> g = element_from_chart<T>(patch, a);
    VecT<T> gi = inverse<T>(g);
    for (int m = 0; m < n; ++m) {
      VecT<Dual<T>> ad(n);
      for (int i = 0; i < n; ++i) ad(i) = Dual<T>(a(i), T(i == m ? 1.0 : 0.0));
      VecT<Dual<T>> gd = Sphere::to_embedding<Dual<T>>(patch, ad);
      VecT<T> dg(4);
      for (int i = 0; i < 4; ++i) dg(i) = gd(i).d;
      VecT<T> x = multiply<T>(gi, dg);
      for (int i = 0; i < 3; ++i) J(i, m) = x(i);
    }
    return J;
  }

  // Tangent vector in chart coordinates at g of the curve s -> exp(s x) g.
  Vec right_field_in_chart(const Point& g_chart, const Vec& x) const;

 private:
  GroupKind kind_ = GroupKind::Torus;
  int dim_ = 0;
  double period_ = 2 * std::numbers::pi;
  Mat Q_;
  std::vector<double> c_;
  std::string id_;
  ManifoldPtr manifold_;
  void validate() const;
};

using LieGroupPtr = std::shared_ptr<const LieGroup>;

}  // namespace clab
