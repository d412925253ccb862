#include "clab/lie.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace clab {

LieGroup LieGroup::torus(int k, double period, Mat Q) {
  LieGroup G;
  G.kind_ = GroupKind::Torus;
  G.dim_ = k;
  G.period_ = period;
  G.Q_ = Q.size() ? Q : Mat(Mat::Identity(k, k));
  G.c_.assign(static_cast<size_t>(k) * k * k, 0.0);
  std::ostringstream os;
  os << "torus:" << k;
  G.id_ = os.str();
  G.manifold_ = std::make_shared<FlatTorus>(k, period);
  G.validate();
  return G;
}

LieGroup LieGroup::trivial() { return torus(0); }

LieGroup LieGroup::su2(double q_scale) {
  LieGroup G;
  G.kind_ = GroupKind::SU2;
  G.dim_ = 3;
  G.Q_ = q_scale * Mat::Identity(3, 3);
  G.c_.assign(27, 0.0);
  auto set = [&](int i, int j, int k) {
    G.c_[(k * 3 + i) * 3 + j] = 2.0;
    G.c_[(k * 3 + j) * 3 + i] = -2.0;
  };
  set(0, 1, 2);
  set(1, 2, 0);
  set(2, 0, 1);
  G.id_ = "su2";
  G.manifold_ = std::make_shared<Sphere>(3);
  G.validate();
  return G;
}

void LieGroup::validate() const {
  if (Q_.rows() != dim_ || Q_.cols() != dim_) throw std::invalid_argument("lie: Q has wrong shape");
  if (dim_ > 0 && !(min_eigenvalue(Q_) > 0.0)) throw std::invalid_argument("lie: Q not positive definite");
  if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-14) throw std::invalid_argument("lie: Q not symmetric");
  if (antisymmetry_residual() > 0.0) throw std::invalid_argument("lie: structure constants not antisymmetric");
  if (jacobi_residual() > 1e-12) throw std::invalid_argument("lie: Jacobi identity fails");
  if (ad_invariance_residual() > 1e-12) throw std::invalid_argument("lie: Q is not ad-invariant");
}

Vec LieGroup::bracket(const Vec& x, const Vec& y) const {
  if (x.size() != dim_ || y.size() != dim_) throw std::invalid_argument("dimension mismatch");
  Vec r = Vec::Zero(dim_);
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(k) += c(k, i, j) * x(i) * y(j);
  return r;
}

double LieGroup::q_inner(const Vec& x, const Vec& y) const {
  if (x.size() != dim_ || y.size() != dim_) throw std::invalid_argument("dimension mismatch");
  return x.dot(Q_ * y);
}

double LieGroup::q_norm(const Vec& x) const { return std::sqrt(q_inner(x, x)); }

double LieGroup::biinvariant_sec_term(const Vec& a, const Vec& b) const {
  Vec z = bracket(a, b);
  return 0.25 * q_inner(z, z);
}

double LieGroup::antisymmetry_residual() const {
  double r = 0;
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r = std::max(r, std::abs(c(k, i, j) + c(k, j, i)));
  return r;
}

double LieGroup::jacobi_residual() const {
  double r = 0;
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int cc = 0; cc < dim_; ++cc) {
        Vec x = Vec::Unit(dim_, a), y = Vec::Unit(dim_, b), z = Vec::Unit(dim_, cc);
        Vec s = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
        r = std::max(r, s.cwiseAbs().maxCoeff());
      }
  return r;
}

double LieGroup::ad_invariance_residual() const {
  double r = 0;
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int cc = 0; cc < dim_; ++cc) {
        Vec x = Vec::Unit(dim_, a), y = Vec::Unit(dim_, b), z = Vec::Unit(dim_, cc);
        r = std::max(r, std::abs(q_inner(bracket(x, y), z) + q_inner(y, bracket(x, z))));
      }
  return r;
}

Vec LieGroup::normalize(const Vec& g) const {
  if (kind_ == GroupKind::SU2) return g / g.norm();
  Vec r = g;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    r(i) = std::fmod(r(i), period_);
    if (r(i) < 0) r(i) += period_;
  }
  return r;
}

double LieGroup::element_distance(const Vec& a, const Vec& b) const {
  if (kind_ == GroupKind::SU2) return (a - b).norm();
  Vec d = a - b;
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) -= period_ * std::round(d(i) / period_);
  return d.norm();
}

bool LieGroup::is_valid(const Vec& g, double tol) const {
  if (g.size() != element_size()) return false;
  if (kind_ == GroupKind::SU2) return std::abs(g.norm() - 1.0) <= tol;
  return g.allFinite();
}

Point LieGroup::chart_point(const Vec& g) const {
  if (kind_ == GroupKind::Torus) return manifold_->canonical(Point{0, normalize(g)});
  const auto& s = static_cast<const Sphere&>(*manifold_);
  return s.canonical(s.from_ambient(g));
}

namespace {
class LeftInvariant : public MetricFieldT<LeftInvariant> {
 public:
  LeftInvariant(const LieGroup& G, double scale) : MetricFieldT(G.manifold()), G_(G), scale_(scale) {}
  std::string describe() const override {
    std::ostringstream os;
    os << scale_ << "*Q(" << G_.registry_id() << ")";
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& a) const {
    MatT<T> J = G_.left_jacobian<T>(patch, a);
    MatT<T> Q = lift<T>(Mat(scale_ * G_.Q()));
    return MatT<T>(J.transpose() * Q * J);
  }

 private:
  LieGroup G_;
  double scale_;
};
}  // namespace

MetricPtr LieGroup::left_invariant_metric(double scale) const { return std::make_shared<LeftInvariant>(*this, scale); }

Vec LieGroup::right_field_in_chart(const Point& gp, const Vec& x) const {
  const int n = dim_;
  VecT<Dual1> xs(n);
  for (int i = 0; i < n; ++i) xs(i) = Dual1(0.0, x(i));
  VecT<Dual1> g = lift<Dual1>(Vec(element_at(gp)));
  VecT<Dual1> h = multiply<Dual1>(exp<Dual1>(xs), g);
  VecT<Dual1> a = chart_from_element<Dual1>(gp.patch, h);
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = a(i).d;
  return out;
}

}  // namespace clab
