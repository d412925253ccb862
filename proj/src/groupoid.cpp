#include "clab/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "clab/sampling.hpp"

namespace clab {

namespace {

double gap(const Manifold& M, const Point& p, const Point& q) {
  auto d = M.difference(p, q);
  return d ? d->norm() : std::numeric_limits<double>::infinity();
}

Point random_element_point(const LieGroup& G, std::mt19937_64& rng) {
  return G.manifold()->sample_reference(rng);
}

}  // namespace

Point ObjectMap::operator()(const Point& p) const {
  const Manifold& M = *cod_;
  for (int k = 0; k < M.num_patches(); ++k) {
    Vec y = map(p.patch, p.coords, k);
    if (!y.allFinite()) continue;
    Vec w = M.wrap(k, y);
    if (M.contains(k, w)) return M.canonical(Point{k, w});
  }
  throw std::runtime_error("object map: no chart contains the image point");
}

// ---- structure maps

Mat UnitGroupoid::source_jacobian(const Point&) const {
  const int n = M_->dim();
  return Mat::Identity(n, n);
}

TransformationGroupoid::TransformationGroupoid(ActionPtr on_M)
    : on_M_(std::move(on_M)), arrows_(std::make_shared<ProductManifold>(on_M_->group().manifold(), on_M_->manifold())),
      arrows_any_(arrows_) {}

Point TransformationGroupoid::arrow(const Vec& g, const Point& x) const {
  return arrows_->join(group().chart_point(g), x);
}
Vec TransformationGroupoid::element(const Point& a) const { return group().element_at(arrows_->split(a).first); }
Point TransformationGroupoid::source(const Point& a) const { return arrows_->split(a).second; }
Point TransformationGroupoid::target(const Point& a) const { return on_M_->act(element(a), source(a)); }
Point TransformationGroupoid::unit(const Point& x) const { return arrow(group().identity<double>(), x); }
Point TransformationGroupoid::inverse(const Point& a) const {
  return arrow(group().inverse<double>(element(a)), target(a));
}
Point TransformationGroupoid::multiply(const Point& a, const Point& b) const {
  return arrow(group().multiply<double>(element(a), element(b)), source(b));
}
Point TransformationGroupoid::sample_arrow(std::mt19937_64& rng) const {
  Point x = objects()->canonical(objects()->sample_reference(rng));
  return sample_arrow_from(x, rng);
}
Point TransformationGroupoid::sample_arrow_from(const Point& x, std::mt19937_64& rng) const {
  return arrow(group().element_at(random_element_point(group(), rng)), x);
}
Mat TransformationGroupoid::source_jacobian(const Point&) const {
  const int k = group().dim(), m = objects()->dim();
  Mat J = Mat::Zero(m, k + m);
  J.rightCols(m).setIdentity();
  return J;
}

Mat TransformationGroupoid::source_kernel_basis(const Point&) const {
  const LieGroup& G = group();
  const int k = G.dim(), m = objects()->dim();
  Point e = G.chart_point(G.identity<double>());
  Mat K = Mat::Zero(k + m, k);
  for (int i = 0; i < k; ++i) {
    VecT<Dual1> xs = VecT<Dual1>::Zero(k);
    xs(i) = Dual1(0.0, 1.0);
    VecT<Dual1> ch = G.chart_from_element<Dual1>(e.patch, G.exp<Dual1>(xs));
    for (int j = 0; j < k; ++j) K(j, i) = ch(j).d;
  }
  return K;
}

double AxiomReport::max() const {
  return std::max({source_mult, target_mult, associativity, unit, inverse});
}

AxiomReport validate_groupoid(const Groupoid& G, int samples, std::uint64_t seed) {
  AxiomReport r;
  r.samples = samples;
  std::mt19937_64 rng(seed);
  const Manifold& A = *G.arrows();
  const Manifold& M = *G.objects();
  for (int n = 0; n < samples; ++n) {
    Point k = G.sample_arrow(rng);
    Point h = G.sample_arrow_from(G.target(k), rng);
    Point g = G.sample_arrow_from(G.target(h), rng);
    Point gh = G.multiply(g, h);
    r.source_mult = std::max(r.source_mult, gap(M, G.source(gh), G.source(h)));
    r.target_mult = std::max(r.target_mult, gap(M, G.target(gh), G.target(g)));
    r.associativity = std::max(r.associativity, gap(A, G.multiply(gh, k), G.multiply(g, G.multiply(h, k))));
    Point us = G.unit(G.source(g)), ut = G.unit(G.target(g));
    double u = std::max({gap(A, G.multiply(ut, g), g), gap(A, G.multiply(g, us), g),
                         gap(M, G.source(us), G.source(g)), gap(M, G.target(us), G.source(g))});
    r.unit = std::max(r.unit, u);
    Point gi = G.inverse(g);
    double iv = std::max({gap(A, G.multiply(g, gi), ut), gap(A, G.multiply(gi, g), us),
                          gap(M, G.source(gi), G.target(g)), gap(M, G.target(gi), G.source(g))});
    r.inverse = std::max(r.inverse, iv);
  }
  return r;
}

OneMetricReport validate_one_metric(const Groupoid& G, const MetricField& eta1, const MetricField& gM, int samples,
                                    std::uint64_t seed) {
  OneMetricReport r;
  std::mt19937_64 rng(seed);
  const Manifold& A = *G.arrows();
  const int N = A.dim();
  for (int n = 0; n < samples; ++n) {
    Point a = A.canonical(G.sample_arrow(rng));
    Mat H1 = eta1(a);
    Mat J = G.source_jacobian(a);
    if (J.rows() > 0) {
      Mat V = Eigen::FullPivLU<Mat>(J).kernel();
      if (V.cols() == 1 && V.norm() == 0.0) V.resize(N, 0);
      Mat H = orthogonal_complement(H1, V);
      Mat up = H.transpose() * H1 * H;
      Mat JH = J * H;
      Mat down = JH.transpose() * gM(G.source(a)) * JH;
      r.submersion = std::max(r.submersion, (up - down).norm() / std::max(1.0, up.norm()));
    }
    // inversion by central differences
    Point ai = G.inverse(a);
    Mat D(N, N);
    const double h = 1e-5;
    for (int j = 0; j < N; ++j) {
      Point ap = a, am = a;
      ap.coords(j) += h;
      am.coords(j) -= h;
      auto dp = A.difference(ai, G.inverse(ap)), dm = A.difference(ai, G.inverse(am));
      if (!dp || !dm) throw std::runtime_error("validate_one_metric: inversion left the chart");
      D.col(j) = (*dp - *dm) / (2 * h);
    }
    Mat pulled = D.transpose() * eta1(ai) * D;
    r.inversion = std::max(r.inversion, (pulled - H1).norm() / std::max(1.0, H1.norm()));
  }
  return r;
}

// ---- maps and actions used by the registry

namespace {

class ToPoint : public ObjectMapT<ToPoint> {
 public:
  using ObjectMapT::ObjectMapT;
  template <class T>
  VecT<T> apply(int, const VecT<T>&, int) const { return VecT<T>(0); }
};

class SphereIdentity : public ObjectMapT<SphereIdentity> {
 public:
  explicit SphereIdentity(std::shared_ptr<const Sphere> s) : ObjectMapT(s, s) {}
  template <class T>
  VecT<T> apply(int patch, const VecT<T>& x, int out) const {
    if (patch == out) return x;
    return Sphere::from_embedding<T>(out, Sphere::to_embedding<T>(patch, x));
  }
};

class TargetMap : public ObjectMapT<TargetMap> {
 public:
  explicit TargetMap(TransformationGroupoidPtr G) : ObjectMapT(G->arrows(), G->objects()), G_(std::move(G)) {
    nb_ = G_->objects()->num_patches();
  }
  template <class T>
  VecT<T> apply(int patch, const VecT<T>& x, int out) const {
    const int k = G_->group().dim();
    const Eigen::Index m = x.size() - k;
    VecT<T> g = G_->group().element_from_chart<T>(patch / nb_, VecT<T>(x.head(k)));
    return G_->base_action()->act(g, patch % nb_, VecT<T>(x.tail(m)), out);
  }

 private:
  TransformationGroupoidPtr G_;
  int nb_ = 1;
};

// first `m` coordinates of a flat torus
class LeadingCoordinates : public ObjectMapT<LeadingCoordinates> {
 public:
  LeadingCoordinates(ManifoldPtr P, ManifoldPtr M) : ObjectMapT(std::move(P), std::move(M)) {}
  template <class T>
  VecT<T> apply(int, const VecT<T>& x, int) const { return x.head(codomain()->dim()); }
};

// h.(g, x) = (hg, x) on the arrows of G x S^n
class LeftOnArrows : public ActionT<LeftOnArrows> {
 public:
  explicit LeftOnArrows(TransformationGroupoidPtr G)
      : ActionT(G->group_ptr(), G->arrows(), "left-on-arrows"), G_(std::move(G)) {
    nb_ = G_->objects()->num_patches();
  }
  template <class T>
  VecT<T> apply(const VecT<T>& h, int patch, const VecT<T>& x, int out) const {
    const LieGroup& L = G_->group();
    const int k = L.dim();
    const Eigen::Index m = x.size() - k;
    VecT<T> g = L.element_from_chart<T>(patch / nb_, VecT<T>(x.head(k)));
    VecT<T> y(x.size());
    y.head(k) = L.chart_from_element<T>(out / nb_, L.multiply<T>(h, g));
    VecT<T> b = x.tail(m);
    if (out % nb_ != patch % nb_) b = Sphere::from_embedding<T>(out % nb_, Sphere::to_embedding<T>(patch % nb_, b));
    y.tail(m) = b;
    return y;
  }

 private:
  TransformationGroupoidPtr G_;
  int nb_ = 1;
};

// translation of the first k coordinates of a flat torus
class LeadingTranslation : public ActionT<LeadingTranslation> {
 public:
  LeadingTranslation(LieGroupPtr G, ManifoldPtr P) : ActionT(std::move(G), std::move(P), "leading-translation") {}
  template <class T>
  VecT<T> apply(const VecT<T>& g, int, const VecT<T>& x, int) const {
    VecT<T> y = x;
    y.head(g.size()) += g;
    return y;
  }
};

std::vector<std::pair<ActionPtr, MetricPtr>> classical_cases() {
  auto s3 = std::make_shared<Sphere>(3);
  auto s2 = std::make_shared<Sphere>(2);
  auto t2 = std::make_shared<FlatTorus>(2);
  MetricPtr g3 = round_sphere_metric(s3);
  return {{hopf_action(s3), g3},
          {weighted_circle_action(s3, 1, 2), g3},
          {torus_on_s3_action(s3), g3},
          {su2_left_action(s3), g3},
          {rotation_s2_action(s2), round_sphere_metric(s2)},
          {torus_translation_action(t2), flat_metric(t2)}};
}

GroupoidAction rotation_groupoid_base(std::shared_ptr<const Sphere>& s2) {
  s2 = std::make_shared<Sphere>(2);
  GroupoidAction A;
  A.groupoid = std::make_shared<TransformationGroupoid>(rotation_s2_action(s2));
  A.g_M = round_sphere_metric(s2);
  A.eta_1 = product_metric(A.groupoid->product(), A.groupoid->group().left_invariant_metric(), A.g_M);
  return A;
}

}  // namespace

GroupoidAction group_case(ActionPtr action, MetricPtr g) {
  GroupoidAction A;
  A.id = "group:" + action->registry_id();
  auto pt = std::make_shared<PointManifold>();
  A.groupoid = std::make_shared<TransformationGroupoid>(trivial_action(action->group_ptr(), pt));
  A.on_P = std::move(action);
  A.alpha = std::make_shared<ToPoint>(A.on_P->manifold(), pt);
  A.eta_P = std::move(g);
  A.g_M = flat_metric(pt);
  A.eta_1 = product_metric(A.groupoid->product(), A.groupoid->group().left_invariant_metric(), A.g_M);
  return A;
}

std::vector<std::string> groupoid_action_ids() {
  std::vector<std::string> ids;
  for (const auto& c : classical_cases()) ids.push_back("group:" + c.first->registry_id());
  ids.insert(ids.end(), {"s1-s2-left-on-target", "s1-s2-identity", "t1-t2-translation"});
  return ids;
}

GroupoidAction groupoid_action(const std::string& id) {
  for (auto& c : classical_cases())
    if (id == "group:" + c.first->registry_id()) return group_case(c.first, c.second);
  if (id == "s1-s2-left-on-target") {
    std::shared_ptr<const Sphere> s2;
    GroupoidAction A = rotation_groupoid_base(s2);
    A.id = id;
    A.on_P = std::make_shared<LeftOnArrows>(A.groupoid);
    A.alpha = std::make_shared<TargetMap>(A.groupoid);
    A.eta_P = A.eta_1;
    return A;
  }
  if (id == "s1-s2-identity") {
    std::shared_ptr<const Sphere> s2;
    GroupoidAction A = rotation_groupoid_base(s2);
    A.id = id;
    A.on_P = A.groupoid->base_action();
    A.alpha = std::make_shared<SphereIdentity>(s2);
    A.eta_P = A.g_M;
    return A;
  }
  if (id == "t1-t2-translation") {
    auto t1 = std::make_shared<FlatTorus>(1);
    auto t2 = std::make_shared<FlatTorus>(2);
    GroupoidAction A;
    A.id = id;
    A.groupoid = std::make_shared<TransformationGroupoid>(torus_translation_action(t1));
    A.g_M = flat_metric(t1);
    A.eta_1 = product_metric(A.groupoid->product(), A.groupoid->group().left_invariant_metric(), A.g_M);
    A.on_P = std::make_shared<LeadingTranslation>(A.groupoid->group_ptr(), t2);
    A.alpha = std::make_shared<LeadingCoordinates>(t2, t1);
    A.eta_P = flat_metric(t2);
    return A;
  }
  throw std::invalid_argument("unknown groupoid action: " + id);
}

// ---- orbit data

Point unit_over(const GroupoidAction& A, const Point& p) { return A.groupoid->unit((*A.alpha)(p)); }

Mat source_kernel_basis(const GroupoidAction& A, const Point& p) {
  return A.groupoid->source_kernel_basis((*A.alpha)(p));
}

Vec groupoid_action_field(const GroupoidAction& A, const Vec& X, const Point& p) {
  const LieGroup& G = A.group();
  const int k = G.dim();
  Point u = unit_over(A, p);
  Mat Ds = A.groupoid->source_jacobian(u);
  if ((Ds * X).norm() > 1e-10 * std::max(1.0, X.norm())) throw std::invalid_argument("x-not-in-kernel");
  Point e = G.chart_point(G.identity<double>());
  VecT<Dual1> a(k);
  for (int i = 0; i < k; ++i) a(i) = Dual1(e.coords(i), X(i));
  VecT<Dual1> y = A.on_P->act(G.element_from_chart<Dual1>(e.patch, a), p.patch, lift<Dual1>(p.coords), p.patch);
  Vec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = -y(i).d;
  return out;
}

Mat groupoid_orbit_fields(const GroupoidAction& A, const Point& p) { return -A.on_P->action_fields(p); }

Mat kernel_gram(const GroupoidAction& A, const Point& p) {
  Mat K = source_kernel_basis(A, p);
  return K.transpose() * (*A.eta_1)(unit_over(A, p)) * K;
}

Mat groupoid_shape_tensor(const GroupoidAction& A, const Point& p) {
  const int k = A.group().dim();
  if (k == 0) return Mat(0, 0);
  Mat E = groupoid_orbit_fields(A, p);
  Mat GP = E.transpose() * (*A.eta_P)(p) * E;
  return kernel_gram(A, p).ldlt().solve(GP);
}

TangentSplit groupoid_split(const GroupoidAction& A, const Point& p, const Vec& v) {
  return split_tangent(groupoid_orbit_fields(A, p), (*A.eta_P)(p), kernel_gram(A, p), v);
}

double hypothesis_residual(const GroupoidAction& A, const Point& p) {
  if (A.alpha->codomain()->dim() == 0) return 0.0;
  Mat G = (*A.eta_P)(p);
  Mat N = orthogonal_complement(G, groupoid_orbit_fields(A, p));
  Mat J = A.alpha->jacobian(p, (*A.alpha)(p).patch);
  double r = 0;
  for (Eigen::Index i = 0; i < N.cols(); ++i) {
    Vec n = N.col(i) / std::sqrt(N.col(i).dot(G * N.col(i)));
    r = std::max(r, (J * n).norm());
  }
  return r;
}

HypothesisReport hypothesis_check(const GroupoidAction& A, int samples, std::uint64_t seed, double tol) {
  HypothesisReport h;
  SampleSet s = sample_manifold(*A.P(), samples, seed);
  h.samples = static_cast<int>(s.points.size());
  for (const Point& p : s.points) {
    double r = hypothesis_residual(A, p);
    if (r > tol) ++h.failures;
    if (r >= h.max_residual) {
      h.max_residual = r;
      h.worst = p;
    }
  }
  h.pass = h.failures == 0;
  return h;
}

ActionReport validate_action(const GroupoidAction& A, int samples, std::uint64_t seed) {
  ActionReport r;
  SampleSet s = sample_manifold(*A.P(), samples, seed);
  std::mt19937_64 rng(seed + 1);
  const Manifold& M = *A.groupoid->objects();
  for (const Point& p : s.points) {
    Point a = A.groupoid->sample_arrow_from((*A.alpha)(p), rng);
    Vec g = A.groupoid->element(a);
    Point gp = A.on_P->act(g, p);
    r.anchor = std::max(r.anchor, gap(M, (*A.alpha)(gp), A.groupoid->target(a)));
    Mat G0 = (*A.eta_P)(p), G1 = (*A.eta_P)(gp);
    Mat N0 = orthogonal_complement(G0, groupoid_orbit_fields(A, p));
    Mat N1 = orthogonal_complement(G1, groupoid_orbit_fields(A, gp));
    if (N0.cols() == 0) continue;
    Mat D = action_jacobian(*A.on_P, g, p, gp.patch) * N0;
    // component in the normal space at g.p
    Mat DN = N1 * (N1.transpose() * G1 * N1).ldlt().solve(N1.transpose() * G1 * D);
    Mat up = DN.transpose() * G1 * DN, down = N0.transpose() * G0 * N0;
    r.transverse = std::max(r.transverse, (up - down).norm() / std::max(1.0, down.norm()));
  }
  return r;
}

// ---- the deformed metric

namespace {

class GroupoidCheeger : public MetricFieldT<GroupoidCheeger> {
 public:
  GroupoidCheeger(GroupoidAction A, double eps) : MetricFieldT(A.P()), A_(std::move(A)), eps_(eps) {
    const LieGroup& G = A_.group();
    e_ = G.chart_point(G.identity<double>());
    K_ = A_.groupoid->source_kernel_basis(Point{});
    nbM_ = A_.groupoid->objects()->num_patches();
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "groupoid-cheeger(" << A_.id << ", eps=" << eps_ << ")";
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    MatT<T> G = A_.eta_P->eval(patch, x);
    const int k = A_.group().dim();
    if (k == 0) return G;
    int out = (*A_.alpha)(Point{patch, real_part<T>(MatT<T>(x))}).patch;
    VecT<T> ax = A_.alpha->map(patch, x, out);
    VecT<T> arrow(k + ax.size());
    arrow.head(k) = lift<T>(e_.coords);
    arrow.tail(ax.size()) = ax;
    MatT<T> H1 = A_.eta_1->eval(e_.patch * nbM_ + out, arrow);
    MatT<T> K = lift<T>(K_);
    MatT<T> Gram = K.transpose() * H1 * K;
    MatT<T> E = A_.on_P->fields<T>(patch, x);
    MatT<T> EtG = E.transpose() * G;
    MatT<T> M = Gram + eps_ * (EtG * E);
    MatT<T> r = G - eps_ * EtG.transpose() * solve<T>(M, EtG);
    return T(0.5) * (r + r.transpose());
  }

 private:
  GroupoidAction A_;
  double eps_;
  Point e_;
  Mat K_;
  int nbM_ = 1;
};

Vec apply_factor(const GroupoidAction& A, double eps, const Point& p, const Vec& v, bool inverse_map) {
  const int k = A.group().dim();
  if (k == 0) return v;
  TangentSplit sp = groupoid_split(A, p, v);
  Mat M = Mat::Identity(k, k) + eps * groupoid_shape_tensor(A, p);
  Vec y = inverse_map ? Vec(M * sp.x) : Vec(M.partialPivLu().solve(sp.x));
  return groupoid_orbit_fields(A, p) * y + sp.normal;
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("groupoid: eps must be finite and > 0");
}

}  // namespace

MetricPtr groupoid_cheeger_metric(const GroupoidAction& A, double eps) {
  check_eps(eps);
  HypothesisReport h = hypothesis_check(A, 8, 17);
  if (!h.pass) throw std::domain_error("hypothesis-violated");
  auto m = std::make_shared<GroupoidCheeger>(A, eps);
  for (const Point& p : sample_manifold(*A.P(), 4, 19).points)
    if (!(min_eigenvalue((*m)(p)) > 0.0)) throw std::domain_error("spd-failure");
  return m;
}

Vec groupoid_cheeger_tensor(const GroupoidAction& A, double eps, const Point& p, const Vec& v) {
  return apply_factor(A, eps, p, v, false);
}
Vec groupoid_cheeger_tensor_inverse(const GroupoidAction& A, double eps, const Point& p, const Vec& v) {
  return apply_factor(A, eps, p, v, true);
}

// ---- ambient space and lifts

std::shared_ptr<const ProductManifold> ambient_manifold(const GroupoidAction& A) {
  return std::make_shared<ProductManifold>(A.groupoid->arrows(), A.P());
}
Point ambient_point(const GroupoidAction& A, const Point& p) { return ambient_manifold(A)->join(unit_over(A, p), p); }
MetricPtr ambient_metric(const GroupoidAction& A, double eps) {
  check_eps(eps);
  return product_metric(ambient_manifold(A), A.eta_1, A.eta_P, 1.0 / eps, 1.0);
}

namespace {
// -eps K_G Sh x, the group block of the lift
Vec lift_group_block(const GroupoidAction& A, double eps, const Point& p, const Vec& X) {
  const int k = A.group().dim();
  if (k == 0) return Vec(0);
  Mat K = source_kernel_basis(A, p);
  Vec x = groupoid_split(A, p, X).x;
  return -eps * K.topRows(k) * (groupoid_shape_tensor(A, p) * x);
}
}  // namespace

Vec groupoid_horizontal_lift(const GroupoidAction& A, double eps, const Point& p, const Vec& X) {
  const int k = A.group().dim(), m = A.groupoid->objects()->dim(), n = A.P()->dim();
  Vec h = Vec::Zero(k + m + n);
  h.head(k) = lift_group_block(A, eps, p, X);
  h.tail(n) = X;
  return h;
}

LiftCheck lift_check(const GroupoidAction& A, double eps, const Point& p, const Vec& X) {
  LiftCheck c;
  const LieGroup& G = A.group();
  const int k = G.dim(), m = A.groupoid->objects()->dim(), n = A.P()->dim();
  Vec h = groupoid_horizontal_lift(A, eps, p, X);
  // D tbar(h) through dual numbers
  Point e = G.chart_point(G.identity<double>());
  VecT<Dual1> a(k), q(n);
  for (int i = 0; i < k; ++i) a(i) = Dual1(e.coords(i), h(i));
  for (int i = 0; i < n; ++i) q(i) = Dual1(p.coords(i), h(k + m + i));
  VecT<Dual1> y = A.on_P->act(G.element_from_chart<Dual1>(e.patch, a), p.patch, q, p.patch);
  Vec push(n);
  for (int i = 0; i < n; ++i) push(i) = y(i).d;
  c.pushforward = (push - groupoid_cheeger_tensor_inverse(A, eps, p, X)).norm();
  // vertical vectors (K_i, X_i*)
  Point z = ambient_point(A, p);
  Mat Gh = ambient_metric(A, eps)->eval(z.patch, z.coords);
  Mat K = source_kernel_basis(A, p), E = groupoid_orbit_fields(A, p);
  const double hn = std::sqrt(h.dot(Gh * h));
  for (int i = 0; i < k; ++i) {
    Vec V(k + m + n);
    V.head(k + m) = K.col(i);
    V.tail(n) = E.col(i);
    double vn = std::sqrt(V.dot(Gh * V));
    if (hn > 0 && vn > 0) c.horizontal = std::max(c.horizontal, std::abs(h.dot(Gh * V)) / (hn * vn));
  }
  if (m > 0) c.tangency = (A.alpha->jacobian(p, (*A.alpha)(p).patch) * X - h.segment(k, m)).norm();
  return c;
}

// ---- the fibered product as G x P

namespace {

class PulledBack : public MetricFieldT<PulledBack> {
 public:
  PulledBack(ManifoldPtr F, GroupoidAction A, double eps) : MetricFieldT(std::move(F)), A_(std::move(A)), eps_(eps) {
    nbP_ = A_.P()->num_patches();
    nbM_ = A_.groupoid->objects()->num_patches();
  }
  std::string describe() const override { return "fibered(" + A_.id + ")"; }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    const int k = A_.group().dim(), n = A_.P()->dim(), m = A_.groupoid->objects()->dim();
    const int ia = patch / nbP_, ib = patch % nbP_;
    VecT<T> q = x.tail(n);
    int out = (*A_.alpha)(Point{ib, real_part<T>(MatT<T>(q))}).patch;
    VecT<T> arrow(k + m);
    arrow.head(k) = x.head(k);
    arrow.tail(m) = A_.alpha->map(ib, q, out);
    MatT<T> H1 = A_.eta_1->eval(ia * nbM_ + out, arrow);
    MatT<T> Phi = MatT<T>::Zero(k + m, k + n);
    for (int i = 0; i < k; ++i) Phi(i, i) = T(1.0);
    if (m > 0) Phi.bottomRightCorner(m, n) = A_.alpha->jacobian<T>(ib, q, out);
    MatT<T> r = (T(1.0 / eps_) * Phi.transpose()) * H1 * Phi;
    r.bottomRightCorner(n, n) += A_.eta_P->eval(ib, q);
    return r;
  }

 private:
  GroupoidAction A_;
  double eps_;
  int nbP_ = 1, nbM_ = 1;
};

// (g, p) -> g.p, vertical fields d/ds (g exp(-s e_i), exp(s e_i) p)
class Fibered : public SubmersionT<Fibered> {
 public:
  Fibered(MetricPtr total, MetricPtr base, GroupoidAction A)
      : SubmersionT(std::move(total), std::move(base)), A_(std::move(A)) {
    nbP_ = A_.P()->num_patches();
  }
  template <class T>
  MatT<T> vert(int patch, const VecT<T>& x) const {
    const LieGroup& G = A_.group();
    const int k = G.dim(), ia = patch / nbP_, ib = patch % nbP_;
    const Eigen::Index n = x.size() - k;
    VecT<T> g = G.element_from_chart<T>(ia, VecT<T>(x.head(k)));
    VecT<T> q = x.tail(n);
    MatT<T> V(x.size(), k);
    using D = Dual<T>;
    for (int i = 0; i < k; ++i) {
      VecT<D> xs = VecT<D>::Zero(k);
      xs(i) = D(T(0.0), T(-1.0));
      VecT<D> gd(g.size());
      for (Eigen::Index j = 0; j < g.size(); ++j) gd(j) = D(g(j), T(0.0));
      VecT<D> ch = G.chart_from_element<D>(ia, G.multiply<D>(gd, G.exp<D>(xs)));
      for (int j = 0; j < k; ++j) V(j, i) = ch(j).d;
      V.block(k, i, n, 1) = A_.on_P->field<T>(Vec::Unit(k, i), ib, q);
    }
    return V;
  }
  template <class T>
  VecT<T> proj(int patch, const VecT<T>& x, int base_patch) const {
    const LieGroup& G = A_.group();
    const int k = G.dim();
    const Eigen::Index n = x.size() - k;
    VecT<T> g = G.element_from_chart<T>(patch / nbP_, VecT<T>(x.head(k)));
    return A_.on_P->act(g, patch % nbP_, VecT<T>(x.tail(n)), base_patch);
  }

 private:
  GroupoidAction A_;
  int nbP_ = 1;
};

std::shared_ptr<const ProductManifold> fibered_manifold(const GroupoidAction& A) {
  return std::make_shared<ProductManifold>(A.group().manifold(), A.P());
}

}  // namespace

SubmersionPtr fibered_submersion(const GroupoidAction& A, double eps) {
  check_eps(eps);
  MetricPtr total = std::make_shared<PulledBack>(fibered_manifold(A), A, eps);
  MetricPtr base = std::make_shared<GroupoidCheeger>(A, eps);
  return std::make_shared<Fibered>(total, base, A);
}

Point fibered_point(const GroupoidAction& A, const Point& p) {
  const LieGroup& G = A.group();
  return fibered_manifold(A)->join(G.chart_point(G.identity<double>()), p);
}

Vec fibered_lift(const GroupoidAction& A, double eps, const Point& p, const Vec& X) {
  const int k = A.group().dim(), n = A.P()->dim();
  Vec u(k + n);
  u.head(k) = lift_group_block(A, eps, p, X);
  u.tail(n) = X;
  return u;
}

Vec fibered_to_ambient(const GroupoidAction& A, const Point& p, const Vec& u) {
  const int k = A.group().dim(), m = A.groupoid->objects()->dim(), n = A.P()->dim();
  Vec z(k + m + n);
  z.head(k) = u.head(k);
  if (m > 0) z.segment(k, m) = A.alpha->jacobian(p, (*A.alpha)(p).patch) * u.tail(n);
  z.tail(n) = u.tail(n);
  return z;
}

// ---- second fundamental form

namespace {

struct AmbientChart {
  int patch = 0;    // ambient patch
  int p_patch = 0;  // patch of P
  int m_patch = 0;  // patch of M used by the constraint
  int k = 0, m = 0, n = 0;
  Vec z0;
};

AmbientChart ambient_chart(const GroupoidAction& A, const Point& p) {
  AmbientChart c;
  Point z = ambient_point(A, p);
  c.patch = z.patch;
  c.z0 = z.coords;
  c.p_patch = p.patch;
  c.m_patch = (*A.alpha)(p).patch;
  c.k = A.group().dim();
  c.m = A.groupoid->objects()->dim();
  c.n = A.P()->dim();
  return c;
}

// [0, I, -D alpha] at z
template <class T>
MatT<T> constraint_rows(const GroupoidAction& A, const AmbientChart& c, const VecT<T>& z) {
  MatT<T> J = MatT<T>::Zero(c.m, c.k + c.m + c.n);
  for (int i = 0; i < c.m; ++i) J(i, c.k + i) = T(1.0);
  J.rightCols(c.n) = -A.alpha->jacobian<T>(c.p_patch, VecT<T>(z.tail(c.n)), c.m_patch);
  return J;
}

template <class T>
MatT<T> normal_projector(const MatT<T>& G, const MatT<T>& J) {
  MatT<T> GiJt = solve<T>(G, MatT<T>(J.transpose()));
  MatT<T> S = J * GiJt;
  return GiJt * solve<T>(S, J);
}

// Gamma(v, w) of the metric at z0, contracted.
Vec christoffel_contract(const MetricField& g, int patch, const Vec& z0, const Vec& v, const Vec& w) {
  const Eigen::Index N = z0.size();
  auto dG = [&](const Vec& dir) {
    VecT<Dual1> z(N);
    for (Eigen::Index i = 0; i < N; ++i) z(i) = Dual1(z0(i), dir(i));
    MatT<Dual1> Gd = g.eval(patch, z);
    Mat out(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j) out(i, j) = Gd(i, j).d;
    return out;
  };
  Mat Dv = dG(v), Dw = dG(w);
  Vec third(N);
  for (Eigen::Index l = 0; l < N; ++l) third(l) = v.dot(dG(Vec::Unit(N, l)) * w);
  Vec lower = Dv * w + Dw * v - third;
  return 0.5 * g.eval(patch, z0).ldlt().solve(lower);
}

}  // namespace

Mat constraint_jacobian(const GroupoidAction& A, const Point& p) {
  AmbientChart c = ambient_chart(A, p);
  return constraint_rows<double>(A, c, c.z0);
}

Vec second_fundamental_form(const GroupoidAction& A, double eps, const Point& p, const Vec& v, const Vec& w,
                            FormMethod method) {
  AmbientChart c = ambient_chart(A, p);
  const int N = c.k + c.m + c.n;
  if (v.size() != N || w.size() != N) throw std::invalid_argument("second_fundamental_form: dimension mismatch");
  Mat J = constraint_rows<double>(A, c, c.z0);
  for (const Vec* u : {&v, &w})
    if ((J * *u).norm() > 1e-10 * std::max(1.0, u->norm())) throw std::invalid_argument("constraint-violation");
  if (c.m == 0) return Vec::Zero(N);
  MetricPtr g = ambient_metric(A, eps);
  Mat G = g->eval(c.patch, c.z0);
  Mat PN = normal_projector<double>(G, J);
  Vec gamma = christoffel_contract(*g, c.patch, c.z0, v, w);
  if (method == FormMethod::Embedding) {
    // D^2 iota(v, w) lives in the M-block: the Hessian of alpha
    VecT<HyperDual> q(c.n);
    for (int i = 0; i < c.n; ++i) q(i) = seed2(c.z0(c.k + c.m + i), v(c.k + c.m + i), w(c.k + c.m + i));
    VecT<HyperDual> a = A.alpha->map(c.p_patch, q, c.m_patch);
    Vec second = Vec::Zero(N);
    for (int i = 0; i < c.m; ++i) second(c.k + i) = hd_dab(a(i));
    return PN * (second + gamma);
  }
  // extend w by the tangent projection along the line z0 + s v
  VecT<Dual1> z(N);
  for (int i = 0; i < N; ++i) z(i) = Dual1(c.z0(i), v(i));
  MatT<Dual1> Gd = g->eval(c.patch, z);
  MatT<Dual1> Jd = constraint_rows<Dual1>(A, c, z);
  MatT<Dual1> PNd = normal_projector<Dual1>(Gd, Jd);
  VecT<Dual1> W = lift<Dual1>(w) - PNd * lift<Dual1>(w);
  Vec dW(N);
  for (int i = 0; i < N; ++i) dW(i) = W(i).d;
  return PN * (dW + gamma);
}

// ---- curvature

GroupoidRhs rhs_full_curvature(const GroupoidAction& A, double eps, const Point& p, const Vec& v, const Vec& w,
                               GaussSign sign) {
  check_eps(eps);
  if (hypothesis_residual(A, p) > 1e-8) throw std::domain_error("hypothesis-violated");
  GroupoidRhs r;
  CurvatureData cd = curvature_tensor(*A.eta_P, p);
  if (gram_determinant(cd.g, v, w) <= 1e-12) throw std::domain_error("degenerate-plane");
  r.base_term = curvature_form(cd, v, w);
  const int k = A.group().dim(), m = A.groupoid->objects()->dim();
  Vec uv = fibered_lift(A, eps, p, v), uw = fibered_lift(A, eps, p, w);
  Vec hv = fibered_to_ambient(A, p, uv), hw = fibered_to_ambient(A, p, uw);
  if (k > 0) {
    CurvatureData c1 = curvature_tensor(*A.eta_1, unit_over(A, p));
    r.groupoid_term = curvature_form(c1, hv.head(k + m), hw.head(k + m)) / eps;
    SubmersionPtr sub = fibered_submersion(A, eps);
    Point F = fibered_point(A, p);
    Vec a = a_tensor(*sub, F, uv, uw);
    r.a_term = 3.0 * a.dot(sub->total_metric()->eval(F.patch, F.coords) * a);
  }
  if (m > 0) {
    Point z = ambient_point(A, p);
    Mat G = ambient_metric(A, eps)->eval(z.patch, z.coords);
    Vec ivw = second_fundamental_form(A, eps, p, hv, hw);
    Vec ivv = second_fundamental_form(A, eps, p, hv, hv);
    Vec iww = second_fundamental_form(A, eps, p, hw, hw);
    r.ii_norm = ivw.dot(G * ivw);
    r.ii_pair = ivv.dot(G * iww);
  }
  double ii = sign == GaussSign::Gauss ? r.ii_pair - r.ii_norm : r.ii_norm - r.ii_pair;
  r.unnormalized = r.base_term + r.groupoid_term + r.a_term + ii;
  GroupoidCheeger me(A, eps);
  r.gram = gram_determinant(me(p), groupoid_cheeger_tensor_inverse(A, eps, p, v),
                            groupoid_cheeger_tensor_inverse(A, eps, p, w));
  r.normalized = r.unnormalized / r.gram;
  return r;
}

double groupoid_lhs_curvature(const GroupoidAction& A, double eps, const Point& p, const Vec& v, const Vec& w) {
  check_eps(eps);
  GroupoidCheeger me(A, eps);
  return sectional_curvature(me, p, groupoid_cheeger_tensor_inverse(A, eps, p, v),
                             groupoid_cheeger_tensor_inverse(A, eps, p, w));
}

}  // namespace clab
