#include "clab/submersion.hpp"

#include <stdexcept>

#include "clab/action.hpp"

namespace clab {

Point Submersion::project(const Point& p) const {
  const Manifold& B = *base();
  for (int k = 0; k < B.num_patches(); ++k) {
    Vec y = project(p.patch, p.coords, k);
    if (!y.allFinite()) continue;
    Vec w = B.wrap(k, y);
    if (B.contains(k, w)) return B.canonical(Point{k, w});
  }
  throw std::runtime_error("submersion: projection leaves every base chart");
}

Mat Submersion::differential(const Point& p, int base_patch) const {
  const int n = total()->dim(), m = base()->dim();
  Mat D(m, n);
  for (int a = 0; a < n; ++a) {
    VecT<Dual1> x(n);
    for (int i = 0; i < n; ++i) x(i) = Dual1(p.coords(i), i == a ? 1.0 : 0.0);
    VecT<Dual1> y = project(p.patch, x, base_patch);
    for (int i = 0; i < m; ++i) D(i, a) = y(i).d;
  }
  return D;
}

Mat horizontal_projector(const Submersion& s, const Point& p) {
  return horizontal_projector<double>(s.total_metric()->eval(p.patch, p.coords), s.vertical(p.patch, p.coords));
}

namespace {

// Directional derivative along Y of the extension of X, evaluated at p.
Vec extension_derivative(const VerticalFrame& f, const Point& p, const Vec& X, const Vec& Y, Extension ext,
                         const Mat& B) {
  const int n = static_cast<int>(p.coords.size());
  VecT<Dual1> q(n);
  for (int i = 0; i < n; ++i) q(i) = Dual1(p.coords(i), Y(i));
  MatT<Dual1> G = f.metric->eval(p.patch, q);
  MatT<Dual1> V = f.v1(p.patch, q);
  MatT<Dual1> P = horizontal_projector<Dual1>(G, V);
  VecT<Dual1> Xc = lift<Dual1>(X);
  if (ext == Extension::Perturbed) {
    // X + B (q - p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) Xc(i) += B(i, j) * Dual1(0.0, Y(j));
  }
  VecT<Dual1> Xt = P * Xc;
  Vec out(n);
  for (int i = 0; i < n; ++i) out(i) = Xt(i).d;
  return out;
}

Mat perturbation(int n) {
  // deterministic, well-scaled, not symmetric
  Mat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = std::sin(1.0 + 3.0 * i + 7.0 * j) * 0.8;
  return B;
}

}  // namespace

VerticalFrame frame_of(const Submersion& s) {
  VerticalFrame f;
  f.metric = s.total_metric().get();
  f.v0 = [&s](int patch, const Vec& x) { return s.vertical(patch, x); };
  f.v1 = [&s](int patch, const VecT<Dual1>& x) { return s.vertical(patch, x); };
  return f;
}

Vec a_tensor(const Submersion& s, const Point& p, const Vec& X, const Vec& Y, Extension ext) {
  return a_tensor(frame_of(s), p, X, Y, ext);
}

Vec a_tensor(const VerticalFrame& s, const Point& p, const Vec& X, const Vec& Y, Extension ext) {
  const int n = static_cast<int>(p.coords.size());
  Mat G = s.metric->eval(p.patch, p.coords);
  Mat V = s.v0(p.patch, p.coords);
  Mat Ph = horizontal_projector<double>(G, V);
  double scale = std::max({1.0, X.norm(), Y.norm()});
  if ((Ph * X - X).norm() > 1e-10 * scale || (Ph * Y - Y).norm() > 1e-10 * scale)
    throw std::invalid_argument("non-horizontal input");
  Mat B = perturbation(n);
  Vec DYX = extension_derivative(s, p, Y, X, ext, B);  // (X . d) Y~
  Vec DXY = extension_derivative(s, p, X, Y, ext, B);  // (Y . d) X~
  Vec bracket = DYX - DXY;
  Mat Pv = Mat::Identity(n, n) - Ph;
  return 0.5 * Pv * bracket;
}

double a_tensor_extension_gap(const Submersion& s, const Point& p, const Vec& X, const Vec& Y) {
  return (a_tensor(s, p, X, Y, Extension::Projected) - a_tensor(s, p, X, Y, Extension::Perturbed)).norm();
}

Vec horizontal_lift(const Submersion& s, const Point& p, const Vec& v_base) {
  Point b = s.project(p);
  Mat D = s.differential(p, b.patch);
  Mat Ph = horizontal_projector(s, p);
  Mat M = D * Ph;
  Vec X = M.completeOrthogonalDecomposition().solve(v_base);
  return Ph * X;
}

ONeillTerms oneill_residual(const Submersion& s, const Point& p, const Vec& v, const Vec& w) {
  Point b = s.project(p);
  ONeillTerms r;
  r.k_base = sectional_curvature(*s.base_metric(), b, v, w);
  Vec X = horizontal_lift(s, p, v), Y = horizontal_lift(s, p, w);
  CurvatureData c = curvature_tensor(*s.total_metric(), p);
  r.k_total = sectional_curvature(c, X, Y);
  Vec A = a_tensor(s, p, X, Y);
  r.a_norm2 = A.dot(c.g * A) / gram_determinant(c.g, X, Y);
  r.residual = r.k_base - (r.k_total + 3.0 * r.a_norm2);
  return r;
}

double submersion_rank_margin(const Submersion& s, const std::vector<Point>& pts) {
  double worst = std::numeric_limits<double>::infinity();
  for (const Point& p : pts) {
    Point b = s.project(p);
    Mat D = s.differential(p, b.patch);
    Eigen::JacobiSVD<Mat> svd(D);
    worst = std::min(worst, svd.singularValues().minCoeff());
  }
  return worst;
}

namespace {

class HopfSubmersion : public SubmersionT<HopfSubmersion> {
 public:
  HopfSubmersion(std::shared_ptr<const Sphere> s3, std::shared_ptr<const Sphere> s2)
      : SubmersionT(round_sphere_metric(s3), round_sphere_metric(s2, 0.5)), hopf_(hopf_action(s3)) {}
  template <class T>
  MatT<T> vert(int patch, const VecT<T>& x) const { return hopf_->fields<T>(patch, x); }
  template <class T>
  VecT<T> proj(int patch, const VecT<T>& x, int base_patch) const {
    VecT<T> z = Sphere::to_embedding<T>(patch, x);
    // (2 z1 conj(z2), |z1|^2 - |z2|^2) with z1 = z0 + i z1', z2 = z2' + i z3'
    VecT<T> y(3);
    y(0) = 2.0 * (z(0) * z(2) + z(1) * z(3));
    y(1) = 2.0 * (z(1) * z(2) - z(0) * z(3));
    y(2) = z(0) * z(0) + z(1) * z(1) - z(2) * z(2) - z(3) * z(3);
    return Sphere::from_embedding<T>(base_patch, y);
  }

 private:
  ActionPtr hopf_;
};

class FlatProduct : public SubmersionT<FlatProduct> {
 public:
  FlatProduct(int n, int k)
      : SubmersionT(flat_metric(std::make_shared<FlatTorus>(n)), flat_metric(std::make_shared<FlatTorus>(n - k))),
        n_(n), k_(k) {}
  template <class T>
  MatT<T> vert(int, const VecT<T>&) const {
    MatT<T> V = MatT<T>::Zero(n_, k_);
    for (int i = 0; i < k_; ++i) V(n_ - k_ + i, i) = T(1.0);
    return V;
  }
  template <class T>
  VecT<T> proj(int, const VecT<T>& x, int) const { return VecT<T>(x.head(n_ - k_)); }

 private:
  int n_, k_;
};

}  // namespace

SubmersionPtr hopf_submersion(std::shared_ptr<const Sphere> s3, std::shared_ptr<const Sphere> s2) {
  return std::make_shared<HopfSubmersion>(std::move(s3), std::move(s2));
}

SubmersionPtr flat_product_submersion(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("flat_product_submersion: need 0 < k < n");
  return std::make_shared<FlatProduct>(n, k);
}

}  // namespace clab
