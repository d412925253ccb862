#include "clab/action.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace clab {

Point Action::act(const Vec& g, const Point& p) const {
  // Evaluate through the embedding-free path: try the current patch, then fall back to the others.
  const Manifold& M = *M_;
  for (int k = 0; k < M.num_patches(); ++k) {
    int out = (p.patch + k) % M.num_patches();
    Vec y = act(g, p.patch, p.coords, out);
    if (y.allFinite()) {
      Vec w = M.wrap(out, y);
      if (M.contains(out, w)) return M.canonical(Point{out, w});
    }
  }
  throw std::runtime_error("action: no chart contains the image point");
}

namespace {

template <class T>
void rotate(VecT<T>& z, int i, const T& th) {
  T c = cos(th), s = sin(th);
  T a = c * z(i) - s * z(i + 1);
  T b = s * z(i) + c * z(i + 1);
  z(i) = a;
  z(i + 1) = b;
}

class WeightedCircle : public ActionT<WeightedCircle> {
 public:
  WeightedCircle(std::shared_ptr<const Sphere> s3, int p, int q, std::string id)
      : ActionT(std::make_shared<LieGroup>(LieGroup::torus(1)), s3, std::move(id)), p_(p), q_(q) {}
  template <class T>
  VecT<T> apply(const VecT<T>& g, int patch, const VecT<T>& x, int out) const {
    VecT<T> z = Sphere::to_embedding<T>(patch, x);
    rotate<T>(z, 0, T(g(0) * double(p_)));
    rotate<T>(z, 2, T(g(0) * double(q_)));
    return Sphere::from_embedding<T>(out, z);
  }

 private:
  int p_, q_;
};

class TorusOnS3 : public ActionT<TorusOnS3> {
 public:
  explicit TorusOnS3(std::shared_ptr<const Sphere> s3)
      : ActionT(std::make_shared<LieGroup>(LieGroup::torus(2)), s3, "t2-s3") {}
  template <class T>
  VecT<T> apply(const VecT<T>& g, int patch, const VecT<T>& x, int out) const {
    VecT<T> z = Sphere::to_embedding<T>(patch, x);
    rotate<T>(z, 0, g(0));
    rotate<T>(z, 2, g(1));
    return Sphere::from_embedding<T>(out, z);
  }
};

class RotationS2 : public ActionT<RotationS2> {
 public:
  explicit RotationS2(std::shared_ptr<const Sphere> s2)
      : ActionT(std::make_shared<LieGroup>(LieGroup::torus(1)), s2, "s1-s2-rotation") {}
  template <class T>
  VecT<T> apply(const VecT<T>& g, int patch, const VecT<T>& x, int out) const {
    VecT<T> z = Sphere::to_embedding<T>(patch, x);
    rotate<T>(z, 0, g(0));
    return Sphere::from_embedding<T>(out, z);
  }
};

class Translation : public ActionT<Translation> {
 public:
  explicit Translation(std::shared_ptr<const FlatTorus> t)
      : ActionT(std::make_shared<LieGroup>(LieGroup::torus(t->dim(), t->period())), t,
                "t" + std::to_string(t->dim()) + "-translation") {}
  template <class T>
  VecT<T> apply(const VecT<T>& g, int, const VecT<T>& x, int) const { return x + g; }
};

class SU2Left : public ActionT<SU2Left> {
 public:
  explicit SU2Left(std::shared_ptr<const Sphere> s3)
      : ActionT(std::make_shared<LieGroup>(LieGroup::su2()), s3, "su2-s3-left") {}
  template <class T>
  VecT<T> apply(const VecT<T>& g, int patch, const VecT<T>& x, int out) const {
    VecT<T> z = Sphere::to_embedding<T>(patch, x);
    return Sphere::from_embedding<T>(out, group().multiply<T>(g, z));
  }
};

class Trivial : public ActionT<Trivial> {
 public:
  Trivial(LieGroupPtr G, ManifoldPtr M) : ActionT(std::move(G), M, "trivial") {}
  template <class T>
  VecT<T> apply(const VecT<T>&, int patch, const VecT<T>& x, int out) const {
    if (patch == out) return x;
    Point p{patch, real_part<T>(MatT<T>(x))};
    auto y = manifold()->transition(p, out);
    if (!y) {
      VecT<T> bad(x.size());
      bad.setConstant(T(std::numeric_limits<double>::quiet_NaN()));
      return bad;
    }
    return lift<T>(Vec(*y));
  }
};

}  // namespace

ActionPtr hopf_action(std::shared_ptr<const Sphere> s3) {
  if (s3->dim() != 3) throw std::invalid_argument("hopf_action: needs S^3");
  return std::make_shared<WeightedCircle>(std::move(s3), 1, 1, "hopf-s3");
}
ActionPtr weighted_circle_action(std::shared_ptr<const Sphere> s3, int p, int q) {
  if (s3->dim() != 3) throw std::invalid_argument("weighted_circle_action: needs S^3");
  std::ostringstream os;
  os << "s1-s3-weighted:" << p << "," << q;
  return std::make_shared<WeightedCircle>(std::move(s3), p, q, os.str());
}
ActionPtr torus_on_s3_action(std::shared_ptr<const Sphere> s3) {
  if (s3->dim() != 3) throw std::invalid_argument("torus_on_s3_action: needs S^3");
  return std::make_shared<TorusOnS3>(std::move(s3));
}
ActionPtr rotation_s2_action(std::shared_ptr<const Sphere> s2) {
  if (s2->dim() != 2) throw std::invalid_argument("rotation_s2_action: needs S^2");
  return std::make_shared<RotationS2>(std::move(s2));
}
ActionPtr torus_translation_action(std::shared_ptr<const FlatTorus> tk) { return std::make_shared<Translation>(std::move(tk)); }
ActionPtr su2_left_action(std::shared_ptr<const Sphere> s3) {
  if (s3->dim() != 3) throw std::invalid_argument("su2_left_action: needs S^3");
  return std::make_shared<SU2Left>(std::move(s3));
}
ActionPtr trivial_action(LieGroupPtr G, ManifoldPtr M) { return std::make_shared<Trivial>(std::move(G), std::move(M)); }

Mat gram_of_fields(const Action& A, const MetricField& g, const Point& p) {
  Mat E = A.action_fields(p);
  return E.transpose() * g(p) * E;
}

Mat shape_tensor(const Action& A, const MetricField& g, const Point& p) {
  Mat Gr = gram_of_fields(A, g, p);
  return A.group().Q().ldlt().solve(Gr);
}

TangentSplit split_tangent(const Mat& E, const Mat& G, const Mat& Q, const Vec& v) {
  TangentSplit s;
  const Eigen::Index k = E.cols();
  if (k == 0) {
    s.tangent = Vec::Zero(v.size());
    s.normal = v;
    s.x = Vec();
    return s;
  }
  // Minimize Q(x,x) subject to E x = orthogonal projection of v onto span(E).
  Eigen::LLT<Mat> llt(Q);
  Mat L = llt.matrixL();
  Mat Ep = L.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(E);  // E L^{-T}
  Mat gram = Ep.transpose() * G * Ep;
  Vec y = pinv_psd(gram) * (Ep.transpose() * G * v);
  s.x = L.transpose().triangularView<Eigen::Upper>().solve(y);
  s.tangent = E * s.x;
  s.normal = v - s.tangent;
  return s;
}

TangentSplit split_tangent(const Action& A, const MetricField& g, const Point& p, const Vec& v) {
  return split_tangent(A.action_fields(p), g(p), A.group().Q(), v);
}

std::vector<Vec> group_sweep(const LieGroup& G, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec> out;
  if (G.kind() == GroupKind::Torus) {
    const int k = G.dim();
    // Kronecker sequence with irrational steps sqrt(prime) mod 1.
    static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    Vec offset(k), step(k);
    for (int i = 0; i < k; ++i) {
      offset(i) = U(rng);
      step(i) = std::fmod(std::sqrt(primes[i % 8]), 1.0);
    }
    for (int n = 0; n < count; ++n) {
      Vec g(k);
      for (int i = 0; i < k; ++i) {
        double f = k == 1 ? (n + offset(i)) / count : std::fmod(offset(i) + n * step(i), 1.0);
        g(i) = G.period() * f;
      }
      out.push_back(g);
    }
    return out;
  }
  // SU(2): Clifford-coordinate lattice with a random shift.
  double o1 = U(rng), o2 = U(rng), o3 = U(rng);
  const double tau = 2 * std::numbers::pi;
  for (int n = 0; n < count; ++n) {
    double u = std::fmod(o1 + (n + 0.5) / count, 1.0);
    double a = tau * std::fmod(o2 + n * 0.6180339887498949, 1.0);
    double b = tau * std::fmod(o3 + n * 0.7548776662466927, 1.0);
    double c = std::sqrt(1 - u), s = std::sqrt(u);
    Vec q(4);
    q << c * std::sin(a), s * std::cos(b), s * std::sin(b), c * std::cos(a);
    out.push_back(q);
  }
  return out;
}

std::vector<Point> orbit_sample(const Action& A, const Point& p, int count, std::uint64_t seed) {
  std::vector<Point> out;
  for (const Vec& g : group_sweep(A.group(), count, seed)) out.push_back(A.act(g, p));
  return out;
}

Mat action_jacobian(const Action& A, const Vec& g, const Point& p, int out_patch) {
  const int n = A.manifold()->dim();
  Mat J(n, n);
  VecT<Dual1> gd = lift<Dual1>(g);
  for (int m = 0; m < n; ++m) {
    VecT<Dual1> x(n);
    for (int i = 0; i < n; ++i) x(i) = Dual1(p.coords(i), i == m ? 1.0 : 0.0);
    VecT<Dual1> y = A.act(gd, p.patch, x, out_patch);
    for (int i = 0; i < n; ++i) J(i, m) = y(i).d;
  }
  return J;
}

double isometry_check(const Action& A, const MetricField& g, const std::vector<Point>& samples,
                      const std::vector<Vec>& group_samples) {
  double worst = 0.0;
  for (const Point& p : samples)
    for (const Vec& h : group_samples) {
      Point q = A.act(h, p);
      Mat J = action_jacobian(A, h, p, q.patch);
      // J was computed into q's chart; the image coordinates must agree with q up to wrapping.
      Mat G0 = g(p);
      Mat pull = J.transpose() * g(q) * J;
      double scale = std::max(1.0, G0.cwiseAbs().maxCoeff());
      worst = std::max(worst, (pull - G0).cwiseAbs().maxCoeff() / scale);
    }
  return worst;
}

}  // namespace clab
