#include "clab/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace clab {

namespace {

constexpr double kPi = std::numbers::pi;

template <class Derived>
class DistributionT : public Distribution {
 public:
  Mat eval(int p, const Vec& x) const override { return self().template evaluate<double>(p, x); }
  MatT<Dual1> eval(int p, const VecT<Dual1>& x) const override { return self().template evaluate<Dual1>(p, x); }
  MatT<HyperDual> eval(int p, const VecT<HyperDual>& x) const override {
    return self().template evaluate<HyperDual>(p, x);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

class ActionDistribution : public DistributionT<ActionDistribution> {
 public:
  ActionDistribution(ActionPtr a, Mat d) : a_(std::move(a)), d_(std::move(d)) {}
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    MatT<T> E = a_->fields<T>(patch, x);
    if (d_.size() == 0) return E;
    return E * lift<T>(d_);
  }

 private:
  ActionPtr a_;
  Mat d_;
};

class ConstantDistribution : public DistributionT<ConstantDistribution> {
 public:
  explicit ConstantDistribution(Mat V) : V_(std::move(V)) {}
  template <class T>
  MatT<T> evaluate(int, const VecT<T>&) const { return lift<T>(V_); }

 private:
  Mat V_;
};

// 1 for u <= a, 0 for u >= b, exp(-1/x) smoothstep in between.
template <class T>
T tube_weight(const T& u, double a, double b) {
  if (real(u) <= a) return T(1.0);
  if (real(u) >= b) return T(0.0);
  T x = (u - a) / (b - a);
  T f0 = exp(-1.0 / x), f1 = exp(-1.0 / (1.0 - x));
  return f1 / (f0 + f1);
}

// Cover of S^3 for the T^2 action: tubes around {z2 = 0} and {z1 = 0}, and the regular part.
class S3Tube : public CoverElement {
 public:
  // which = 0: tube around z2 = 0 (u = |z2|^2); which = 1: around z1 = 0; which = 2: complement.
  S3Tube(std::string name, DistributionPtr sub, int which, double plateau, double outer)
      : CoverElement(std::move(name), std::move(sub)), which_(which) {
    a_ = std::pow(std::sin(plateau), 2);
    b_ = std::pow(std::sin(outer), 2);
  }
  double weight(int p, const Vec& x) const override { return w<double>(p, x); }
  Dual1 weight(int p, const VecT<Dual1>& x) const override { return w<Dual1>(p, x); }
  HyperDual weight(int p, const VecT<HyperDual>& x) const override { return w<HyperDual>(p, x); }

 private:
  int which_;
  double a_, b_;
  template <class T>
  T w(int patch, const VecT<T>& x) const {
    VecT<T> z = Sphere::to_embedding<T>(patch, x);
    T u2 = z(2) * z(2) + z(3) * z(3);
    T u1 = z(0) * z(0) + z(1) * z(1);
    if (which_ == 0) return tube_weight<T>(u2, a_, b_);
    if (which_ == 1) return tube_weight<T>(u1, a_, b_);
    return 1.0 - tube_weight<T>(u2, a_, b_) - tube_weight<T>(u1, a_, b_);
  }
};

class ShrinkVertical : public MetricFieldT<ShrinkVertical> {
 public:
  ShrinkVertical(MetricPtr g, DistributionPtr v, double delta, std::string id)
      : MetricFieldT(g->manifold()), g_(std::move(g)), v_(std::move(v)), delta_(delta), id_(std::move(id)) {}
  std::string describe() const override {
    std::ostringstream os;
    os << "shrink(" << id_ << ", delta=" << delta_ << ")";
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    MatT<T> G = g_->eval(patch, x);
    if (delta_ == 1.0) return G;
    MatT<T> V = v_->eval(patch, x);
    Mat M = real_part<T>(MatT<T>(V.transpose() * G * V));
    double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    if (min_eigenvalue(M) <= 1e-12 * scale) throw std::domain_error("rank-drop");
    return scale_block<T>(G, V, T(delta_ * delta_));
  }

 private:
  MetricPtr g_;
  DistributionPtr v_;
  double delta_;
  std::string id_;
};

class SingularCollapse : public MetricFieldT<SingularCollapse> {
 public:
  SingularCollapse(const FoliatedModel& m, double delta)
      : MetricFieldT(m.metric->manifold()), g_(m.metric), cover_(m.cover), rho_(m.rho), delta_(delta), id_(m.id) {
    log_delta_ = std::log(delta);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "singular-collapse(" << id_ << ", delta=" << delta_ << ")";
    return os.str();
  }
  template <class T>
  MatT<T> evaluate(int patch, const VecT<T>& x) const {
    MatT<T> G = (log_delta_ * log_delta_) * g_->eval(patch, x);
    for (const CoverPtr& c : cover_) {
      T phi = c->weight(patch, x);
      if (!(real(phi) > 0.0)) continue;  // rho = 1 off the support
      T expo;
      if (rho_ == RhoProfile::Power) {
        expo = phi;
      } else {
        T ph = real(phi) < 1e-300 ? T(1e-300) : phi;
        expo = log(ph) / std::log(0.5);
      }
      T rho2 = exp(2.0 * log_delta_ * expo);
      G = scale_block<T>(G, c->subfoliation()->eval(patch, x), rho2);
    }
    return G;
  }

 private:
  MetricPtr g_;
  std::vector<CoverPtr> cover_;
  RhoProfile rho_;
  double delta_, log_delta_;
  std::string id_;
};

Point torus_shift(const Manifold& m, const Point& p, const Mat& V, const Vec& theta) {
  Vec x = m.wrap(p.patch, p.coords + V * theta);
  return Point{p.patch, x};
}

FoliatedModel flat_model(const std::string& id, int n, int k) {
  auto tn = std::make_shared<FlatTorus>(n);
  FoliatedModel m;
  m.id = id;
  m.metric = flat_metric(tn);
  Mat V = Mat::Zero(n, k);
  for (int i = 0; i < k; ++i) V(n - k + i, i) = 1.0;
  m.vertical = constant_distribution(V);
  m.leaf_dim = k;
  m.quotient = flat_product_submersion(n, k);
  m.leaf_map = [tn, V](const Point& p, const Vec& th) { return torus_shift(*tn, p, V, th); };
  m.leaf_periods = Vec::Ones(k);
  m.scan_samples = [tn](int count, std::uint64_t seed) { return sample_manifold(*tn, count, seed); };
  m.volume_samples = [tn](int res) { return grid_torus(*tn, res); };
  return m;
}

FoliatedModel orbit_model(const std::string& id, std::shared_ptr<Sphere> s, ActionPtr a, MetricPtr g) {
  FoliatedModel m;
  m.id = id;
  m.metric = std::move(g);
  m.vertical = action_distribution(a);
  m.leaf_dim = a->group().dim();
  m.action = a;
  m.leaf_map = [a](const Point& p, const Vec& th) { return a->act(a->group().exp<double>(th), p); };
  m.leaf_periods = Vec::Constant(m.leaf_dim, 2 * kPi);
  m.scan_samples = [s](int count, std::uint64_t seed) { return sample_manifold(*s, count, seed); };
  return m;
}

}  // namespace

DistributionPtr action_distribution(ActionPtr a, Mat directions) {
  return std::make_shared<ActionDistribution>(std::move(a), std::move(directions));
}
DistributionPtr constant_distribution(Mat V) { return std::make_shared<ConstantDistribution>(std::move(V)); }

std::vector<std::string> foliated_model_ids() {
  return {"hopf-s3", "flat-t2-circle", "flat-t3-circle", "flat-t3-torus", "single-leaf-s2", "t2-s3"};
}

FoliatedModel foliated_model(const std::string& id, const SingularOptions& opt) {
  if (id == "hopf-s3") {
    auto s3 = std::make_shared<Sphere>(3);
    FoliatedModel m = orbit_model(id, s3, hopf_action(s3), round_sphere_metric(s3));
    m.quotient = hopf_submersion(s3, std::make_shared<Sphere>(2));
    m.volume_samples = [s3](int res) { return grid_s3_clifford(*s3, {0.0, kPi / 2}, res, 2 * res); };
    return m;
  }
  if (id == "flat-t2-circle") return flat_model(id, 2, 1);
  if (id == "flat-t3-circle") return flat_model(id, 3, 1);
  if (id == "flat-t3-torus") return flat_model(id, 3, 2);
  if (id == "single-leaf-s2") {
    auto s2 = std::make_shared<Sphere>(2);
    FoliatedModel m;
    m.id = id;
    m.metric = round_sphere_metric(s2);
    m.vertical = constant_distribution(Mat::Identity(2, 2));
    m.leaf_dim = 2;
    m.scan_samples = [s2](int count, std::uint64_t seed) { return sample_manifold(*s2, count, seed); };
    m.volume_samples = [s2](int res) { return sample_manifold(*s2, 200 * res * res, 1); };
    return m;
  }
  if (id == "t2-s3") {
    if (!(opt.plateau_radius > 0 && opt.plateau_radius < opt.outer_radius && opt.outer_radius < kPi / 4))
      throw std::invalid_argument("t2-s3: need 0 < plateau < outer < pi/4 (tubes must be disjoint)");
    auto s3 = std::make_shared<Sphere>(3);
    auto a = torus_on_s3_action(s3);
    FoliatedModel m = orbit_model(id, s3, a, round_sphere_metric(s3));
    m.regular = false;
    m.rho = opt.rho;
    const double r0 = opt.plateau_radius, r1 = opt.outer_radius;
    m.strata = {{"circle-z2-zero", 1, r0, r1}, {"circle-z1-zero", 1, r0, r1}};
    // local regular subfoliations: the circle factor that does not fix the singular leaf
    CoverPtr t0 = std::make_shared<S3Tube>("tube-z2-zero", action_distribution(a, Vec::Unit(2, 0)), 0, r0, r1);
    CoverPtr t1 = std::make_shared<S3Tube>("tube-z1-zero", action_distribution(a, Vec::Unit(2, 1)), 1, r0, r1);
    CoverPtr u0 = std::make_shared<S3Tube>("regular", action_distribution(a), 2, r0, r1);
    m.cover = opt.tubes_first ? std::vector<CoverPtr>{t0, t1, u0} : std::vector<CoverPtr>{u0, t0, t1};
    m.scan_samples = [s3, r0, r1](int count, std::uint64_t seed) {
      // a third in each tube and collar, a third in between
      std::vector<double> s;
      const int k = std::max(1, count / 3);
      for (int i = 0; i < k; ++i) {
        double f = (i + 0.5) / k;
        double near = 0.2 * r0 + f * (1.5 * r1 - 0.2 * r0);
        s.push_back(near);
        s.push_back(kPi / 2 - near);
      }
      const int rest = std::max(0, count - 2 * k);
      for (int i = 0; i < rest; ++i) s.push_back(1.5 * r1 + (i + 0.5) / rest * (kPi / 2 - 3 * r1));
      return stratified_s3(*s3, s, seed);
    };
    m.volume_samples = [s3, r0, r1](int res) {
      return grid_s3_clifford(*s3, {0.0, r0, r1, kPi / 2 - r1, kPi / 2 - r0, kPi / 2}, res, 2 * res);
    };
    // leaves are the level sets of s; both singular circles included
    m.leaf_representatives = [s3](int n, std::uint64_t seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> U(0.0, 2 * kPi);
      std::vector<Point> out;
      for (int i = 0; i < n; ++i) {
        double s = n > 1 ? kPi / 2 * i / (n - 1) : kPi / 4;
        out.push_back(s3_point_from_clifford(*s3, s, U(rng), U(rng)));
      }
      return out;
    };
    return m;
  }
  throw std::invalid_argument("unknown foliated model: " + id);
}

MetricPtr shrink_vertical(const FoliatedModel& m, double delta) {
  if (!m.regular) throw std::invalid_argument("shrink_vertical: model is not regular");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("shrink_vertical: delta must be in (0, 1]");
  return std::make_shared<ShrinkVertical>(m.metric, m.vertical, delta, m.id);
}

double leaf_sectional_curvature(const FoliatedModel& m, const Point& p, const Vec& V, const Vec& W) {
  CurvatureData c = curvature_tensor(*m.metric, p);
  const int n = m.dim();
  Mat Ph = horizontal_projector<double>(c.g, m.vertical->eval(p.patch, p.coords));
  // II(a, b) = (grad_a b~)^h with the vertical extension b~(q) = P_v(q) b
  auto II = [&](const Vec& a, const Vec& b) {
    VecT<Dual1> q(n);
    for (int i = 0; i < n; ++i) q(i) = Dual1(p.coords(i), a(i));
    MatT<Dual1> G = m.metric->eval(p.patch, q);
    MatT<Dual1> Pv = MatT<Dual1>::Identity(n, n) - horizontal_projector<Dual1>(G, m.vertical->eval(p.patch, q));
    VecT<Dual1> bt = Pv * lift<Dual1>(b);
    Vec nab(n);
    for (int k = 0; k < n; ++k) nab(k) = bt(k).d + a.dot(c.christoffel[k] * b);
    return Vec(Ph * nab);
  };
  Vec vv = II(V, V), ww = II(W, W), vw = II(V, W);
  double gauss = vv.dot(c.g * ww) - vw.dot(c.g * vw);
  return sectional_curvature(c, V, W) + gauss / gram_determinant(c.g, V, W);
}

VariationResiduals variation_identity_residuals(const FoliatedModel& m, double delta, const Point& p,
                                                std::uint64_t seed) {
  MetricPtr gd = shrink_vertical(m, delta);
  const int n = m.dim(), l = m.leaf_dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto rnd = [&](int k) {
    Vec v(k);
    for (int i = 0; i < k; ++i) v(i) = N(rng);
    return v;
  };
  CurvatureData c1 = curvature_tensor(*m.metric, p);
  CurvatureData cd = curvature_tensor(*gd, p);
  Mat V = m.vertical->eval(p.patch, p.coords);
  Mat Ph = horizontal_projector<double>(c1.g, V);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto fit = [&](double ratio) {
    if (delta >= 1.0 || !(1.0 - ratio > 0.0)) return nan;
    return std::log(1.0 - ratio) / std::log(delta);
  };
  auto finish = [](IdentityCheck& c) {
    c.available = true;
    c.first_order_residual = c.direct - c.first_order;
    c.corrected_residual = c.direct - c.corrected;
  };
  VariationResiduals out;
  const double d2 = delta * delta;

  if (n - l >= 2 && m.quotient) {
    Vec X = Ph * rnd(n), Y = Ph * rnd(n);
    Point b = m.quotient->project(p);
    Mat D = m.quotient->differential(p, b.patch);
    double Kq = sectional_curvature(*m.quotient->base_metric(), b, D * X, D * Y);
    double Kg = sectional_curvature(c1, X, Y);
    IdentityCheck& h = out.horizontal;
    h.direct = sectional_curvature(cd, X, Y);
    h.first_order = (1 - delta) * Kq + delta * Kg;
    h.corrected = (1 - d2) * Kq + d2 * Kg;
    h.fitted_exponent = std::abs(Kq - Kg) > 1e-9 ? fit((h.direct - Kg) / (Kq - Kg)) : nan;
    finish(h);
  }
  if (n - l >= 1 && l >= 1) {
    Vec X = Ph * rnd(n), W = V * rnd(l);
    // |A_X W|^2 = sum_i g(A_X Y_i, W)^2 over a g-orthonormal horizontal basis
    Mat H = Ph;
    Eigen::SelfAdjointEigenSolver<Mat> es(H.transpose() * c1.g * H);
    VerticalFrame f;
    f.metric = m.metric.get();
    const Distribution* dist = m.vertical.get();
    f.v0 = [dist](int pa, const Vec& x) { return dist->eval(pa, x); };
    f.v1 = [dist](int pa, const VecT<Dual1>& x) { return dist->eval(pa, x); };
    double A2 = 0;
    for (int i = 0; i < n; ++i) {
      double lam = es.eigenvalues()(i);
      if (lam < 1e-10) continue;
      Vec Yi = H * es.eigenvectors().col(i) / std::sqrt(lam);
      Yi = Ph * Yi;
      A2 += std::pow(a_tensor(f, p, X, Yi).dot(c1.g * W), 2);
    }
    double C = A2 / (X.dot(c1.g * X) * W.dot(c1.g * W));
    double Kg = sectional_curvature(c1, X, W);
    IdentityCheck& x = out.mixed;
    x.direct = sectional_curvature(cd, X, W);
    x.first_order = Kg - (1 - delta) * C;
    x.corrected = Kg - (1 - d2) * C;
    x.fitted_exponent = C > 1e-9 ? fit((Kg - x.direct) / C) : nan;
    finish(x);
  }
  if (l >= 2) {
    Vec V1 = V * rnd(l), V2 = V * rnd(l);
    double Kl = leaf_sectional_curvature(m, p, V1, V2);
    double Kg = sectional_curvature(c1, V1, V2);
    IdentityCheck& v = out.vertical;
    v.direct = sectional_curvature(cd, V1, V2);
    v.first_order = (1 - delta) / d2 * Kl + Kg;
    v.corrected = (1 - d2) / d2 * Kl + Kg;
    v.fitted_exponent = std::abs(Kl) > 1e-9 ? fit(d2 * (v.direct - Kg) / Kl) : nan;
    finish(v);
  }
  return out;
}

std::vector<double> partition_of_unity(const FoliatedModel& m, const Point& p) {
  std::vector<double> w;
  double sum = 0;
  for (const CoverPtr& c : m.cover) {
    w.push_back(c->weight(p.patch, p.coords));
    sum += w.back();
  }
  if (m.cover.empty() || !(sum > 0.5)) throw std::domain_error("point outside all cover elements");
  return w;
}

double partition_leaf_variation(const FoliatedModel& m, const Point& p, int count) {
  if (!m.leaf_map) return 0.0;
  std::vector<double> w0 = partition_of_unity(m, p);
  std::mt19937_64 rng(count);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    Vec th(m.leaf_dim);
    for (int a = 0; a < m.leaf_dim; ++a) th(a) = U(rng) * m.leaf_periods(a);
    std::vector<double> w = partition_of_unity(m, m.leaf_map(p, th));
    for (size_t j = 0; j < w.size(); ++j) worst = std::max(worst, std::abs(w[j] - w0[j]));
  }
  return worst;
}

MetricPtr singular_collapse_metric(const FoliatedModel& m, double delta) {
  if (!(delta > 0.0 && delta <= kDeltaMax * (1 + 1e-12)))
    throw std::invalid_argument("singular_collapse_metric: delta must be in (0, 1/e]");
  if (m.cover.empty()) throw std::invalid_argument("singular_collapse_metric: model has no cover");
  for (size_t i = 0; i < m.strata.size(); ++i) {
    const Stratum& s = m.strata[i];
    if (s.leaf_dim < 1) throw std::invalid_argument("singular_collapse_metric: leaves must have positive dimension");
    if (!(s.plateau_radius < s.outer_radius)) throw std::invalid_argument("strata-not-isolated");
  }
  return std::make_shared<SingularCollapse>(m, delta);
}

namespace {

double golden(const std::function<double(double)>& f, double a, double b, int iters) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

double distance_to_leaf(const FoliatedModel& m, const MetricField& g, const Point& x, const Point& q, int grid) {
  if (!m.leaf_map) throw std::invalid_argument("distance_to_leaf: model has no leaf parametrization");
  const int l = m.leaf_dim;
  auto f = [&](const Vec& th) { return segment_length(g, x, m.leaf_map(q, th)); };
  Vec best = Vec::Zero(l);
  double fb = f(best);
  const int total = l == 1 ? grid : grid * grid;
  for (int i = 0; i < total; ++i) {
    Vec th(l);
    th(0) = (i % grid) * m.leaf_periods(0) / grid;
    if (l == 2) th(1) = (i / grid) * m.leaf_periods(1) / grid;
    double v = f(th);
    if (v < fb) {
      fb = v;
      best = th;
    }
  }
  for (int sweep = 0; sweep < 3; ++sweep)
    for (int a = 0; a < l; ++a) {
      double h = m.leaf_periods(a) / grid / (sweep + 1);
      auto fa = [&](double t) {
        Vec th = best;
        th(a) = t;
        return f(th);
      };
      double t = golden(fa, best(a) - h, best(a) + h, 40);
      double v = fa(t);
      if (v < fb) {
        fb = v;
        best(a) = t;
      }
    }
  return fb;
}

double equidistance_spread(const FoliatedModel& m, const Point& p, const Vec& normal, double h, int count) {
  Mat G = m.metric->eval(p.patch, p.coords);
  Mat Ph = horizontal_projector<double>(G, m.vertical->eval(p.patch, p.coords));
  Vec xi = Ph * normal;
  double len = std::sqrt(xi.dot(G * xi));
  if (len < 1e-12) throw std::invalid_argument("equidistance_spread: normal part vanishes");
  Point q{p.patch, p.coords + (h / len) * xi};
  if (!m.metric->manifold()->contains(q.patch, q.coords)) throw std::domain_error("point-outside-patch");
  const int l = m.leaf_dim;
  const int per = l == 1 ? count : std::max(2, static_cast<int>(std::lround(std::sqrt(count))));
  std::vector<double> d;
  for (int i = 0; i < (l == 1 ? per : per * per); ++i) {
    Vec th(l);
    th(0) = (i % per + 0.25) * m.leaf_periods(0) / per;
    if (l == 2) th(1) = (i / per + 0.6) * m.leaf_periods(1) / per;
    d.push_back(distance_to_leaf(m, *m.metric, m.leaf_map(p, th), q));
  }
  auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  double mean = 0;
  for (double v : d) mean += v / d.size();
  return (*hi - *lo) / mean;
}

MetricPtr collapse_metric(const FoliatedModel& m, CollapseMode mode, double delta) {
  return mode == CollapseMode::Regular ? shrink_vertical(m, delta) : singular_collapse_metric(m, delta);
}

CollapseReport collapse_scan(const FoliatedModel& m, CollapseMode mode, std::vector<double> deltas,
                             const CollapseBudget& budget, std::uint64_t seed, const GhHook& gh) {
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  CollapseReport rep;
  rep.model = m.id;
  rep.mode = mode == CollapseMode::Regular ? "regular" : "singular";
  SampleSet scan = m.scan_samples(budget.curvature_points, seed);
  SampleSet vol = m.volume_samples(budget.volume_resolution);
  SampleSet dist;
  if (budget.diameter) dist = sample_manifold(*m.metric->manifold(), budget.distance_points, seed + 2);
  for (double delta : deltas) {
    MetricPtr g = collapse_metric(m, mode, delta);
    CollapseRow row;
    row.delta = delta;
    CurvatureReport cr = curvature_scan(*g, scan, budget.planes_per_point, seed + 1, delta);
    row.min_K = cr.min_K;
    row.max_K = cr.max_K;
    row.max_abs_K = cr.max_abs();
    if (budget.diameter) row.diameter = diameter_estimate(geodesic_distances(*g, dist, budget.k_neighbors));
    VolumeEstimate v = volume_estimate(*g, vol);
    row.volume = v.value;
    row.volume_std_error = v.std_error;
    if (gh) row.gh_bound = gh(*g, delta);
    rep.rows.push_back(row);
  }
  int usable = 0;
  for (double d : deltas) usable += d < 1.0;
  if (usable >= 4) {
    try {
      rep.fit = volume_decay_fit(rep);
    } catch (const std::invalid_argument&) {
    }
  }
  return rep;
}

DecayFit volume_decay_fit(const std::vector<double>& deltas, const std::vector<double>& volumes,
                          std::optional<double> fix_m) {
  if (deltas.size() != volumes.size()) throw std::invalid_argument("volume_decay_fit: size mismatch");
  std::vector<int> use;
  for (size_t i = 0; i < deltas.size(); ++i)
    if (deltas[i] > 0 && deltas[i] < 1.0 && volumes[i] > 0) use.push_back(static_cast<int>(i));
  double lo = 1, hi = 0;
  for (int i : use) {
    lo = std::min(lo, deltas[i]);
    hi = std::max(hi, deltas[i]);
  }
  if (use.size() < 4 || hi / lo < 100.0 * (1 - 1e-9)) throw std::invalid_argument("insufficient rows");
  const int rows = static_cast<int>(use.size()), cols = fix_m ? 2 : 3;
  Mat X(rows, cols);
  Vec y(rows);
  for (int r = 0; r < rows; ++r) {
    double d = deltas[use[r]];
    X(r, 0) = 1.0;
    X(r, 1) = std::log(d);
    y(r) = std::log(volumes[use[r]]);
    if (fix_m)
      y(r) -= *fix_m * std::log(std::abs(std::log(d)));
    else
      X(r, 2) = std::log(std::abs(std::log(d)));
  }
  Mat XtX = X.transpose() * X;
  Vec beta = XtX.ldlt().solve(X.transpose() * y);
  Vec res = y - X * beta;
  double s2 = rows > cols ? res.squaredNorm() / (rows - cols) : 0.0;
  Mat cov = s2 * XtX.inverse();
  DecayFit f;
  f.rows = rows;
  f.log_c = beta(0);
  f.ell = beta(1);
  f.ell_std_error = std::sqrt(std::max(0.0, cov(1, 1)));
  if (fix_m) {
    f.m = *fix_m;
    f.m_fixed = true;
  } else {
    f.m = beta(2);
    f.m_std_error = std::sqrt(std::max(0.0, cov(2, 2)));
  }
  return f;
}

DecayFit volume_decay_fit(const CollapseReport& r, std::optional<double> fix_m) {
  std::vector<double> d, v;
  for (const CollapseRow& row : r.rows) {
    d.push_back(row.delta);
    v.push_back(row.volume);
  }
  return volume_decay_fit(d, v, fix_m);
}

}  // namespace clab
