#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "clab/action.hpp"
#include "clab/sampling.hpp"

using namespace clab;
constexpr double kPi = std::numbers::pi;

namespace {
Vec randn(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0, 1);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

// Not an isometry: the circle also stretches the second coordinate.
class Stretch : public ActionT<Stretch> {
 public:
  explicit Stretch(ManifoldPtr m) : ActionT(std::make_shared<LieGroup>(LieGroup::torus(1)), std::move(m), "stretch") {}
  template <class T> VecT<T> apply(const VecT<T>& g, int, const VecT<T>& x, int) const {
    VecT<T> y = x;
    y(0) = x(0) + g(0);
    y(1) = x(1) * (1.0 + 0.5 * sin(g(0)));
    return y;
  }
};

Vec embed_derivative(const Point& p, const Vec& v) {
  const double h = 1e-6;
  return (Sphere::to_embedding<double>(p.patch, Vec(p.coords + h * v)) -
          Sphere::to_embedding<double>(p.patch, Vec(p.coords - h * v))) / (2 * h);
}
}  // namespace

TEST_CASE("action fields") {
  auto s3 = std::make_shared<Sphere>(3);
  auto hopf = hopf_action(s3);
  MetricPtr g = round_sphere_metric(s3);
  SampleSet s = sample_manifold(*s3, 20, 1);
  std::mt19937_64 rng(2);
  for (const Point& p : s.points) {
    Vec X = hopf->action_field(Vec::Ones(1), p);
    CHECK(X.dot(g->eval(p.patch, p.coords) * X) == doctest::Approx(1.0).epsilon(1e-12));
    // oracle: the field is i z in C^2
    Vec z = *s3->embed(p);
    Vec iz(4);
    iz << -z(1), z(0), -z(3), z(2);
    CHECK((embed_derivative(p, X) - iz).norm() < 1e-8);
  }
  auto t2 = std::make_shared<FlatTorus>(2);
  auto tr = torus_translation_action(t2);
  Vec x = randn(rng, 2);
  CHECK((tr->action_field(x, Point{0, Vec::Constant(2, 0.3)}) - x).norm() < 1e-15);

  auto s2 = std::make_shared<Sphere>(2);
  auto rot = rotation_s2_action(s2);
  CHECK(rot->action_field(Vec::Ones(1), Point{1, Vec::Zero(2)}).norm() < 1e-15);
  CHECK(rot->action_field(Vec::Ones(1), Point{0, Vec::Zero(2)}).norm() < 1e-15);

  // linearity
  auto t2s3 = torus_on_s3_action(s3);
  for (const Point& p : s.points) {
    Vec a = randn(rng, 2), b = randn(rng, 2);
    double al = 0.7, be = -1.9;
    Vec lhs = t2s3->action_field(al * a + be * b, p);
    Vec rhs = al * t2s3->action_field(a, p) + be * t2s3->action_field(b, p);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("action axioms") {
  auto s3 = std::make_shared<Sphere>(3);
  std::vector<ActionPtr> acts = {hopf_action(s3), weighted_circle_action(s3, 2, 3), torus_on_s3_action(s3),
                                 su2_left_action(s3)};
  SampleSet s = sample_manifold(*s3, 15, 4);
  for (const auto& A : acts) {
    const LieGroup& G = A->group();
    auto gs = group_sweep(G, 6, 9);
    for (const Point& p : s.points) {
      Point e = A->act(G.identity<double>(), p);
      CHECK((*s3->embed(e) - *s3->embed(p)).norm() < 1e-12);
      for (size_t i = 0; i + 1 < gs.size(); ++i) {
        Point a = A->act(gs[i], A->act(gs[i + 1], p));
        Point b = A->act(G.multiply<double>(gs[i], gs[i + 1]), p);
        CHECK((*s3->embed(a) - *s3->embed(b)).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("shape tensor") {
  auto s3 = std::make_shared<Sphere>(3);
  MetricPtr g = round_sphere_metric(s3);
  auto hopf = hopf_action(s3);
  SampleSet s = sample_manifold(*s3, 10, 3);
  for (const Point& p : s.points) CHECK(shape_tensor(*hopf, *g, p)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  auto t2 = std::make_shared<FlatTorus>(2);
  Mat S = shape_tensor(*torus_translation_action(t2), *flat_metric(t2), Point{0, Vec::Constant(2, 0.5)});
  CHECK((S - Mat::Identity(2, 2)).norm() < 1e-14);

  auto s2 = std::make_shared<Sphere>(2);
  CHECK(shape_tensor(*rotation_s2_action(s2), *round_sphere_metric(s2), Point{1, Vec::Zero(2)}).norm() < 1e-15);

  // Q-self-adjoint, PSD, and congruent along orbits
  for (const auto& A : {torus_on_s3_action(s3), su2_left_action(s3)}) {
    const Mat& Q = A->group().Q();
    auto gs = group_sweep(A->group(), 4, 1);
    for (const Point& p : s.points) {
      Mat Sp = shape_tensor(*A, *g, p);
      Mat QS = Q * Sp;
      CHECK((QS - QS.transpose()).norm() < 1e-12);
      Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(QS, Q);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      for (const Vec& h : gs) {
        Point q = A->act(h, p);
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eq(Q * shape_tensor(*A, *g, q), Q);
        CHECK((eq.eigenvalues() - es.eigenvalues()).norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("tangent splitting") {
  auto s3 = std::make_shared<Sphere>(3);
  MetricPtr g = round_sphere_metric(s3);
  auto hopf = hopf_action(s3);
  SampleSet s = sample_manifold(*s3, 20, 6);
  std::mt19937_64 rng(7);
  for (const Point& p : s.points) {
    Mat G = g->eval(p.patch, p.coords);
    Vec X = hopf->action_field(Vec::Ones(1), p);
    Vec v = randn(rng, 3);
    TangentSplit sp = split_tangent(*hopf, *g, p, v);
    // oracle: orthogonal projection onto X by hand
    Vec tan = X * (X.dot(G * v) / X.dot(G * X));
    CHECK((sp.tangent - tan).norm() < 1e-12);
    CHECK(std::abs(sp.normal.dot(G * X)) < 1e-12);
    CHECK((sp.tangent + sp.normal - v).norm() < 1e-10);
    // already normal
    TangentSplit n = split_tangent(*hopf, *g, p, sp.normal);
    CHECK(n.tangent.norm() < 1e-12);
    CHECK(n.x.norm() < 1e-12);
    CHECK((n.normal - sp.normal).norm() < 1e-12);
    // already tangent
    Vec xx(1);
    xx << 0.37;
    TangentSplit t = split_tangent(*hopf, *g, p, hopf->action_field(xx, p));
    CHECK(t.normal.norm() < 1e-12);
    CHECK(t.x(0) == doctest::Approx(0.37).epsilon(1e-12));
  }
  // nontrivial isotropy: north pole of S^2, x is the minimal (zero) preimage
  auto s2 = std::make_shared<Sphere>(2);
  TangentSplit np = split_tangent(*rotation_s2_action(s2), *round_sphere_metric(s2), Point{1, Vec::Zero(2)}, Vec::Ones(2));
  CHECK(np.x.norm() == 0.0);
  CHECK((np.normal - Vec::Ones(2)).norm() < 1e-15);
}

TEST_CASE("orbit samples") {
  auto s3 = std::make_shared<Sphere>(3);
  auto s2 = std::make_shared<Sphere>(2);
  Point pole{1, Vec::Zero(2)};
  for (const Point& q : orbit_sample(*rotation_s2_action(s2), pole, 12)) CHECK(q.coords.norm() < 1e-15);

  Point p = s3_point_from_clifford(*s3, 0.4, 0.3, 1.1);
  Vec z0 = *s3->embed(p);
  auto orb = orbit_sample(*hopf_action(s3), p, 16);
  for (const Point& q : orb) {
    Vec z = *s3->embed(q);
    // a great circle through z0 in the complex line: z = e^{i a} z0, chord = 2 sin(a/2)
    Vec iz0(4);
    iz0 << -z0(1), z0(0), -z0(3), z0(2);
    double a = std::atan2(z.dot(iz0), z.dot(z0));
    CHECK((z - (std::cos(a) * z0 + std::sin(a) * iz0)).norm() < 1e-12);
    CHECK((z - z0).norm() == doctest::Approx(2 * std::abs(std::sin(a / 2))).epsilon(1e-10));
  }
  for (const Point& q : orbit_sample(*torus_on_s3_action(s3), p, 30, 2)) {
    Vec z = *s3->embed(q);
    CHECK(std::hypot(z(0), z(1)) == doctest::Approx(std::cos(0.4)).epsilon(1e-12));
    CHECK(std::hypot(z(2), z(3)) == doctest::Approx(std::sin(0.4)).epsilon(1e-12));
  }
  // deterministic
  auto o2 = orbit_sample(*hopf_action(s3), p, 16);
  for (size_t i = 0; i < orb.size(); ++i) CHECK((orb[i].coords - o2[i].coords).norm() == 0.0);
}

TEST_CASE("isometry checks") {
  auto s3 = std::make_shared<Sphere>(3);
  SampleSet s = sample_manifold(*s3, 20, 10);
  MetricPtr g = round_sphere_metric(s3);
  for (const auto& A : {hopf_action(s3), weighted_circle_action(s3, 1, 3), torus_on_s3_action(s3), su2_left_action(s3)})
    CHECK(isometry_check(*A, *g, s.points, group_sweep(A->group(), 8, 2)) <= 1e-9);

  auto t2 = std::make_shared<FlatTorus>(2);
  SampleSet st = sample_manifold(*t2, 20, 3);
  auto tr = torus_translation_action(t2);
  CHECK(isometry_check(*tr, *flat_metric(t2), st.points, group_sweep(tr->group(), 8, 2)) <= 1e-12);

  Stretch bad(t2);
  CHECK(isometry_check(bad, *flat_metric(t2), st.points, group_sweep(bad.group(), 8, 2)) > 1e-3);
}
