#include "clab/cheeger.hpp"

#include <sstream>
#include <stdexcept>

#include "clab/sampling.hpp"

namespace clab {

CheegerContext::CheegerContext(ActionPtr action, MetricPtr g, double t, double isometry_tol)
    : action_(std::move(action)), g_(std::move(g)), t_(t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("cheeger: t must be finite and >= 0");
  if (action_->manifold()->dim() != g_->dim()) throw std::invalid_argument("cheeger: dimension mismatch");
  SampleSet s = sample_manifold(*g_->manifold(), 12, 7);
  double r = isometry_check(*action_, *g_, s.points, group_sweep(action_->group(), 6, 11));
  if (r > isometry_tol) {
    std::ostringstream os;
    os << "cheeger: action is not isometric (residual " << r << ")";
    throw std::invalid_argument(os.str());
  }
}

CheegerContext CheegerContext::with_t(double t) const {
  CheegerContext c = *this;
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("cheeger: t must be finite and >= 0");
  c.t_ = t;
  return c;
}

namespace {

Vec apply_factor(const CheegerContext& c, const Point& p, const Vec& v, bool inverse_map) {
  TangentSplit sp = split_tangent(c.action(), *c.metric(), p, v);
  const int k = c.group().dim();
  if (k == 0) return v;
  Mat S = shape_tensor(c.action(), *c.metric(), p);
  Mat M = Mat::Identity(k, k) + c.t() * S;
  Vec y = inverse_map ? Vec(M * sp.x) : Vec(M.partialPivLu().solve(sp.x));
  return c.action().action_field(y, p) + sp.normal;
}

class Deformed : public MetricFieldT<Deformed> {
 public:
  Deformed(ActionPtr a, MetricPtr g, double t) : MetricFieldT(g->manifold()), a_(std::move(a)), g_(std::move(g)), t_(t) {}
  std::string describe() const override {
    std::ostringstream os;
    os << "cheeger(" << a_->registry_id() << ", t=" << t_ << ", " << g_->describe() << ")";
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    MatT<T> G = g_->eval(patch, x);
    if (t_ == 0.0 || a_->group().dim() == 0) return G;
    MatT<T> E = a_->fields<T>(patch, x);
    MatT<T> EtG = E.transpose() * G;
    MatT<T> M = lift<T>(a_->group().Q()) + t_ * (EtG * E);
    MatT<T> r = G - t_ * EtG.transpose() * solve<T>(M, EtG);
    return T(0.5) * (r + r.transpose());
  }

 private:
  ActionPtr a_;
  MetricPtr g_;
  double t_;
};

// Total space G x M with metric (1/t) Q (+) g.
class CheegerSubmersion : public SubmersionT<CheegerSubmersion> {
 public:
  CheegerSubmersion(const CheegerContext& c, MetricPtr total, MetricPtr base)
      : SubmersionT(std::move(total), std::move(base)), a_(c.action_ptr()) {
    const ProductManifold& pm = dynamic_cast<const ProductManifold&>(*total_metric()->manifold());
    nb_ = pm.second()->num_patches();
    k_ = a_->group().dim();
  }

  template <class T>
  MatT<T> vert(int patch, const VecT<T>& x) const {
    const LieGroup& G = a_->group();
    const int ia = patch / nb_, ib = patch % nb_;
    const Eigen::Index n = x.size();
    const int m = static_cast<int>(n) - k_;
    VecT<T> a = x.head(k_), q = x.tail(m);
    VecT<T> g = G.element_from_chart<T>(ia, a);
    MatT<T> V(n, k_);
    using D = Dual<T>;
    for (int i = 0; i < k_; ++i) {
      VecT<D> xs = VecT<D>::Zero(k_);
      xs(i) = D(T(0.0), T(1.0));
      VecT<D> gd(g.size());
      for (Eigen::Index j = 0; j < g.size(); ++j) gd(j) = D(g(j), T(0.0));
      VecT<D> ch = G.chart_from_element<D>(ia, G.multiply<D>(G.exp<D>(xs), gd));
      for (int j = 0; j < k_; ++j) V(j, i) = ch(j).d;
      V.block(k_, i, m, 1) = a_->field<T>(Vec::Unit(k_, i), ib, q);
    }
    return V;
  }

  template <class T>
  VecT<T> proj(int patch, const VecT<T>& x, int base_patch) const {
    const LieGroup& G = a_->group();
    const int ia = patch / nb_, ib = patch % nb_;
    const int m = static_cast<int>(x.size()) - k_;
    VecT<T> g = G.element_from_chart<T>(ia, VecT<T>(x.head(k_)));
    return a_->act(G.inverse<T>(g), ib, VecT<T>(x.tail(m)), base_patch);
  }

 private:
  ActionPtr a_;
  int nb_ = 1, k_ = 0;
};

}  // namespace

Vec cheeger_tensor(const CheegerContext& c, const Point& p, const Vec& v) { return apply_factor(c, p, v, false); }
Vec cheeger_tensor_inverse(const CheegerContext& c, const Point& p, const Vec& v) {
  return apply_factor(c, p, v, true);
}

MetricPtr deformed_metric(const CheegerContext& c) {
  return std::make_shared<Deformed>(c.action_ptr(), c.metric(), c.t());
}

SubmersionPtr cheeger_submersion(const CheegerContext& c) {
  if (!(c.t() > 0.0)) throw std::invalid_argument("cheeger_submersion: needs t > 0");
  const LieGroup& G = c.group();
  auto pm = std::make_shared<ProductManifold>(G.manifold(), c.metric()->manifold());
  MetricPtr total = product_metric(pm, G.left_invariant_metric(), c.metric(), 1.0 / c.t(), 1.0);
  return std::make_shared<CheegerSubmersion>(c, total, deformed_metric(c));
}

Point cheeger_total_point(const CheegerContext& c, const Point& p) {
  const LieGroup& G = c.group();
  Point e = G.chart_point(G.identity<double>());
  auto pm = std::make_shared<ProductManifold>(G.manifold(), c.metric()->manifold());
  return pm->join(e, p);
}

Vec cheeger_lift(const CheegerContext& c, const Point& p, const Vec& v) {
  const LieGroup& G = c.group();
  const int k = G.dim(), n = static_cast<int>(v.size());
  TangentSplit sp = split_tangent(c.action(), *c.metric(), p, v);
  Mat S = shape_tensor(c.action(), *c.metric(), p);
  Vec zeta = -c.t() * (S * sp.x);
  // chart derivative of s -> exp(s zeta) at the identity
  Point e = G.chart_point(G.identity<double>());
  VecT<Dual1> zs(k);
  for (int i = 0; i < k; ++i) zs(i) = Dual1(0.0, zeta(i));
  VecT<Dual1> ch = G.chart_from_element<Dual1>(e.patch, G.exp<Dual1>(zs));
  Vec out(k + n);
  for (int i = 0; i < k; ++i) out(i) = ch(i).d;
  out.tail(n) = v;
  return out;
}

RhsCurvature rhs_curvature(const CheegerContext& c, const Point& p, const Vec& v, const Vec& w) {
  RhsCurvature r;
  const double t = c.t();
  CurvatureData cd = curvature_tensor(*c.metric(), p);
  if (gram_determinant(cd.g, v, w) <= 1e-12) throw std::domain_error("degenerate-plane");
  r.base_term = curvature_form(cd, v, w);
  if (t > 0.0 && c.group().dim() > 0) {
    Mat S = shape_tensor(c.action(), *c.metric(), p);
    Vec x = split_tangent(c.action(), *c.metric(), p, v).x;
    Vec y = split_tangent(c.action(), *c.metric(), p, w).x;
    r.group_term = t * t * t * c.group().biinvariant_sec_term(S * x, S * y);
    SubmersionPtr sub = cheeger_submersion(c);
    Point P = cheeger_total_point(c, p);
    Vec X = cheeger_lift(c, p, v), Y = cheeger_lift(c, p, w);
    Vec A = a_tensor(*sub, P, X, Y);
    Mat GT = sub->total_metric()->eval(P.patch, P.coords);
    r.a_term = 3.0 * A.dot(GT * A);
  }
  r.unnormalized = r.group_term + r.base_term + r.a_term;
  Mat gt = deformed_metric(c)->eval(p.patch, p.coords);
  r.gram = gram_determinant(gt, cheeger_tensor_inverse(c, p, v), cheeger_tensor_inverse(c, p, w));
  r.normalized = r.unnormalized / r.gram;
  return r;
}

double lhs_curvature(const CheegerContext& c, const Point& p, const Vec& v, const Vec& w) {
  return sectional_curvature(*deformed_metric(c), p, cheeger_tensor_inverse(c, p, v), cheeger_tensor_inverse(c, p, w));
}

}  // namespace clab
