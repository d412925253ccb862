#include "clab/metric_field.hpp"

#include <sstream>
#include <stdexcept>

namespace clab {

Mat metric_eval(const MetricField& field, const Point& p) {
  field.manifold()->check(p);
  Mat G = field(p);
  if (G.rows() != field.dim() || G.cols() != field.dim()) throw std::runtime_error("metric: bad shape");
  double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw std::runtime_error("non-SPD-result: asymmetric");
  if (G.rows() > 0 && !(min_eigenvalue(G) > 0.0)) throw std::runtime_error("non-SPD-result");
  return G;
}

namespace {

class ConstantMetric : public MetricFieldT<ConstantMetric> {
 public:
  ConstantMetric(ManifoldPtr m, Mat G, std::string name)
      : MetricFieldT(std::move(m)), G_(std::move(G)), name_(std::move(name)) {}
  std::string describe() const override { return name_; }
  template <class T>
  MatT<T> evaluate(int, const VecT<T>&) const { return lift<T>(G_); }

 private:
  Mat G_;
  std::string name_;
};

class RoundSphere : public MetricFieldT<RoundSphere> {
 public:
  RoundSphere(ManifoldPtr m, double r) : MetricFieldT(std::move(m)), r_(r) {}
  std::string describe() const override {
    std::ostringstream os;
    os << "round(" << m_->id() << ",r=" << r_ << ")";
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int, const VecT<T>& x) const {
    T r2(0.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) r2 += x(i) * x(i);
    T c = 2.0 * r_ / (1.0 + r2);
    MatT<T> G = MatT<T>::Zero(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) G(i, i) = c * c;
    return G;
  }

 private:
  double r_;
};

class CliffordRound : public MetricFieldT<CliffordRound> {
 public:
  using MetricFieldT::MetricFieldT;
  std::string describe() const override { return "round(s3-clifford)"; }
  template <class T>
  MatT<T> evaluate(int, const VecT<T>& x) const {
    MatT<T> G = MatT<T>::Zero(3, 3);
    T c = cos(x(0)), s = sin(x(0));
    G(0, 0) = T(1.0);
    G(1, 1) = c * c;
    G(2, 2) = s * s;
    return G;
  }
};

class Poincare : public MetricFieldT<Poincare> {
 public:
  using MetricFieldT::MetricFieldT;
  std::string describe() const override { return "poincare-disk"; }
  template <class T>
  MatT<T> evaluate(int, const VecT<T>& x) const {
    T r2 = x(0) * x(0) + x(1) * x(1);
    T c = 2.0 / (1.0 - r2);
    MatT<T> G = MatT<T>::Zero(2, 2);
    G(0, 0) = c * c;
    G(1, 1) = c * c;
    return G;
  }
};

class Scaled : public MetricFieldT<Scaled> {
 public:
  Scaled(MetricPtr g, double f) : MetricFieldT(g->manifold()), g_(std::move(g)), f_(f) {}
  std::string describe() const override {
    std::ostringstream os;
    os << f_ << "*" << g_->describe();
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const { return g_->eval(patch, x) * T(f_); }

 private:
  MetricPtr g_;
  double f_;
};

class Product : public MetricFieldT<Product> {
 public:
  Product(std::shared_ptr<const ProductManifold> m, MetricPtr g1, MetricPtr g2, double a, double b)
      : MetricFieldT(m), pm_(std::move(m)), g1_(std::move(g1)), g2_(std::move(g2)), a_(a), b_(b) {}
  std::string describe() const override {
    std::ostringstream os;
    os << a_ << "*" << g1_->describe() << "+" << b_ << "*" << g2_->describe();
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    const int na = pm_->first()->dim(), nb = pm_->second()->dim();
    const int pb = pm_->second()->num_patches();
    MatT<T> G = MatT<T>::Zero(na + nb, na + nb);
    if (na > 0) G.topLeftCorner(na, na) = g1_->eval(patch / pb, VecT<T>(x.head(na))) * T(a_);
    if (nb > 0) G.bottomRightCorner(nb, nb) = g2_->eval(patch % pb, VecT<T>(x.tail(nb))) * T(b_);
    return G;
  }

 private:
  std::shared_ptr<const ProductManifold> pm_;
  MetricPtr g1_, g2_;
  double a_, b_;
};

}  // namespace

MetricPtr flat_metric(ManifoldPtr m, double scale) {
  int n = m->dim();
  std::ostringstream os;
  os << "flat(" << m->id() << ")";
  return std::make_shared<ConstantMetric>(m, scale * Mat::Identity(n, n), os.str());
}

MetricPtr constant_metric(ManifoldPtr m, const Mat& G) {
  return std::make_shared<ConstantMetric>(m, G, "constant(" + m->id() + ")");
}

MetricPtr round_sphere_metric(std::shared_ptr<const Sphere> s, double radius) {
  return std::make_shared<RoundSphere>(std::move(s), radius);
}

MetricPtr clifford_round_metric(std::shared_ptr<const CliffordS3> m) {
  return std::make_shared<CliffordRound>(std::move(m));
}

MetricPtr poincare_metric(std::shared_ptr<const DiskPatch> m) { return std::make_shared<Poincare>(std::move(m)); }

MetricPtr scaled_metric(MetricPtr g, double factor) { return std::make_shared<Scaled>(std::move(g), factor); }

MetricPtr product_metric(std::shared_ptr<const ProductManifold> m, MetricPtr g1, MetricPtr g2, double a, double b) {
  return std::make_shared<Product>(std::move(m), std::move(g1), std::move(g2), a, b);
}

}  // namespace clab
