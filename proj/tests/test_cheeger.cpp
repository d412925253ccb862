#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "clab/cheeger.hpp"
#include "clab/sampling.hpp"

using namespace clab;

namespace {
Vec randn(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0, 1);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}
struct Hopf {
  std::shared_ptr<Sphere> s3 = std::make_shared<Sphere>(3);
  MetricPtr g = round_sphere_metric(s3);
  ActionPtr a = hopf_action(s3);
};
}  // namespace

TEST_CASE("cheeger tensor") {
  Hopf h;
  CheegerContext c0(h.a, h.g, 0.0);
  SampleSet s = sample_manifold(*h.s3, 10, 1);
  std::mt19937_64 rng(1);
  for (const Point& p : s.points) {
    Vec v = randn(rng, 3);
    CHECK((cheeger_tensor(c0, p, v) - v).norm() < 1e-15);
    Vec X = h.a->action_field(Vec::Ones(1), p);
    Vec xi = split_tangent(*h.a, *h.g, p, v).normal;
    for (double t : {0.1, 1.0, 10.0}) {
      CheegerContext c = c0.with_t(t);
      CHECK((cheeger_tensor(c, p, X) - X / (1 + t)).norm() < 1e-12);
      CHECK((cheeger_tensor(c, p, xi) - xi).norm() < 1e-12);
      CHECK((cheeger_tensor_inverse(c, p, cheeger_tensor(c, p, v)) - v).norm() < 1e-10 * v.norm());
      CHECK((cheeger_tensor(c, p, cheeger_tensor_inverse(c, p, v)) - v).norm() < 1e-10 * v.norm());
    }
  }
  CHECK_THROWS(CheegerContext(h.a, h.g, -1.0));
}

TEST_CASE("deformed metric") {
  Hopf h;
  SampleSet s = sample_manifold(*h.s3, 10, 2);
  std::mt19937_64 rng(2);
  CheegerContext c0(h.a, h.g, 0.0);
  for (const Point& p : s.points) {
    CHECK((deformed_metric(c0)->eval(p.patch, p.coords) - h.g->eval(p.patch, p.coords)).norm() == 0.0);
    Vec u = h.a->action_field(Vec::Ones(1), p);
    Mat G = h.g->eval(p.patch, p.coords);
    double prev = 1.0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      CheegerContext c = c0.with_t(t);
      Mat gt = metric_eval(*deformed_metric(c), p);
      CHECK(u.dot(gt * u) == doctest::Approx(1.0 / (1 + t)).epsilon(1e-12));
      CHECK(u.dot(gt * u) <= prev);
      prev = u.dot(gt * u);
      // two code paths: assembled matrix vs. tensor application
      Vec v = randn(rng, 3), w = randn(rng, 3);
      CHECK(std::abs(v.dot(gt * w) - cheeger_tensor(c, p, v).dot(G * w)) < 1e-10);
      // g_t = g on normal vectors
      Vec xi = split_tangent(*h.a, *h.g, p, v).normal, eta = split_tangent(*h.a, *h.g, p, w).normal;
      CHECK(std::abs(xi.dot(gt * eta) - xi.dot(G * eta)) < 1e-12);
    }
  }
  // transitive translations on the flat torus: g_t = g / (1 + t)
  auto t2 = std::make_shared<FlatTorus>(2);
  CheegerContext ct(torus_translation_action(t2), flat_metric(t2), 3.0);
  CHECK((deformed_metric(ct)->eval(0, Vec(Vec::Constant(2, 0.2))) - Mat::Identity(2, 2) / 4.0).norm() < 1e-15);
  // first-order C^0 convergence as t -> 0
  double last = 0;
  for (int k = 1; k <= 4; ++k) {
    double t = std::pow(10.0, -k), worst = 0;
    for (const Point& p : s.points)
      worst = std::max(worst, (deformed_metric(c0.with_t(t))->eval(p.patch, p.coords) - h.g->eval(p.patch, p.coords)).norm());
    if (k > 1) CHECK(worst / last == doctest::Approx(0.1).epsilon(0.02));
    last = worst;
  }
}

TEST_CASE("non-isometric data is rejected") {
  Hopf h;
  // a constant anisotropic metric in the stereographic chart is not Hopf invariant
  Mat A = Mat::Identity(3, 3);
  A(0, 0) = 2;
  CHECK_THROWS_AS(CheegerContext(h.a, constant_metric(h.s3, A), 1.0), std::invalid_argument);
}

TEST_CASE("A-tensor") {
  auto prod = flat_product_submersion();
  Point p{0, Vec::Constant(3, 0.4)};
  Vec X = Vec::Unit(3, 0), Y = Vec::Unit(3, 1);
  CHECK(a_tensor(*prod, p, X, Y).norm() < 1e-15);
  CHECK_THROWS(a_tensor(*prod, p, Vec::Unit(3, 2), Y));

  auto s3 = std::make_shared<Sphere>(3);
  auto hs = hopf_submersion(s3, std::make_shared<Sphere>(2));
  SampleSet s = sample_manifold(*s3, 20, 3);
  std::mt19937_64 rng(4);
  for (const Point& q : s.points) {
    Mat G = hs->total_metric()->eval(q.patch, q.coords);
    Mat Ph = horizontal_projector(*hs, q);
    Vec a = Ph * randn(rng, 3), b = Ph * randn(rng, 3);
    // orthonormalize
    a /= std::sqrt(a.dot(G * a));
    b -= a * a.dot(G * b);
    b /= std::sqrt(b.dot(G * b));
    Vec A = a_tensor(*hs, q, a, b);
    CHECK(A.dot(G * A) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((A + a_tensor(*hs, q, b, a)).norm() < 1e-12);
    CHECK(a_tensor(*hs, q, a, a).norm() < 1e-12);
    CHECK(a_tensor_extension_gap(*hs, q, a, b) <= 1e-6);
    // vertical output
    CHECK((Ph * A).norm() < 1e-12);
  }
}

TEST_CASE("O'Neill identity") {
  auto prod = flat_product_submersion();
  ONeillTerms r = oneill_residual(*prod, Point{0, Vec::Constant(3, 0.1)}, Vec::Unit(2, 0), Vec::Ones(2));
  CHECK(std::abs(r.residual) <= 1e-8);

  auto s3 = std::make_shared<Sphere>(3);
  auto hs = hopf_submersion(s3, std::make_shared<Sphere>(2));
  SampleSet s = sample_manifold(*s3, 20, 5);
  CHECK(submersion_rank_margin(*hs, s.points) > 0.1);
  std::mt19937_64 rng(6);
  for (const Point& q : s.points) {
    ONeillTerms o = oneill_residual(*hs, q, randn(rng, 2), randn(rng, 2));
    CHECK(o.k_base == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(o.k_total == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(o.residual) <= 1e-3);
  }

  // the Cheeger submersion itself: random total-space points (g, p)
  Hopf h;
  CheegerContext c(h.a, h.g, 1.0);
  auto sub = cheeger_submersion(c);
  SampleSet st = sample_manifold(*sub->total(), 20, 7);
  CHECK(submersion_rank_margin(*sub, st.points) > 1e-3);
  for (const Point& q : st.points) {
    ONeillTerms o = oneill_residual(*sub, q, randn(rng, 3), randn(rng, 3));
    CHECK(std::abs(o.residual) <= 1e-3);
  }
}

TEST_CASE("curvature of g_t against the three-term formula") {
  Hopf h;
  auto t2 = std::make_shared<FlatTorus>(2);
  auto s2 = std::make_shared<Sphere>(2);
  struct Case {
    ActionPtr a;
    MetricPtr g;
  };
  std::vector<Case> cases = {{h.a, h.g},
                             {weighted_circle_action(h.s3, 1, 2), h.g},
                             {torus_on_s3_action(h.s3), h.g},
                             {su2_left_action(h.s3), h.g},
                             {rotation_s2_action(s2), round_sphere_metric(s2)},
                             {torus_translation_action(t2), flat_metric(t2)}};
  std::mt19937_64 rng(9);
  for (const Case& cs : cases) {
    SampleSet s = sample_manifold(*cs.g->manifold(), 6, 11);
    const int n = cs.g->dim();
    for (double t : {0.0, 0.1, 1.0, 10.0}) {
      CheegerContext c(cs.a, cs.g, t);
      for (const Point& p : s.points) {
        Vec v = randn(rng, n), w = randn(rng, n);
        RhsCurvature r = rhs_curvature(c, p, v, w);
        double lhs = lhs_curvature(c, p, v, w);
        INFO(cs.a->registry_id(), " t=", t);
        CHECK(std::abs(lhs - r.normalized) <= 1e-3 * std::max(1.0, std::abs(lhs)));
        CHECK(r.group_term >= -1e-10);
        CHECK(r.a_term >= -1e-10);
        if (cs.a->group().kind() == GroupKind::Torus) CHECK(r.group_term == 0.0);
        if (t == 0.0) CHECK(r.unnormalized == doctest::Approx(r.base_term).epsilon(1e-12));
      }
    }
  }
  // SU(2) acting on the left: g_t = g / (1 + t), so K(g_t) = 1 + t
  CheegerContext c(su2_left_action(h.s3), h.g, 2.0);
  Point p = sample_manifold(*h.s3, 1, 3).points[0];
  CHECK(lhs_curvature(c, p, Vec::Unit(3, 0), Vec::Unit(3, 1)) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("Berger extremes") {
  Hopf h;
  CheegerContext c(h.a, h.g, 1.0);
  MetricPtr gt = deformed_metric(c);
  SampleSet s = sample_manifold(*h.s3, 30, 12);
  std::mt19937_64 rng(13);
  double lo = 1e9, hi = -1e9;
  for (const Point& p : s.points) {
    CurvatureData cd = curvature_tensor(*gt, p);
    for (int k = 0; k < 40; ++k) {
      double K = sectional_curvature(cd, randn(rng, 3), randn(rng, 3));
      lo = std::min(lo, K);
      hi = std::max(hi, K);
    }
    // horizontal and mixed planes hit the extremes exactly
    Vec u = h.a->action_field(Vec::Ones(1), p);
    Vec x = split_tangent(*h.a, *h.g, p, randn(rng, 3)).normal;
    Vec y = split_tangent(*h.a, *h.g, p, randn(rng, 3)).normal;
    CHECK(sectional_curvature(cd, x, y) == doctest::Approx(2.5).epsilon(1e-8));
    CHECK(sectional_curvature(cd, u, x) == doctest::Approx(0.5).epsilon(1e-8));
  }
  CHECK(lo >= 0.5 - 1e-8);
  CHECK(hi <= 2.5 + 1e-8);
  CHECK(lo == doctest::Approx(0.5).epsilon(0.02));
  CHECK(hi == doctest::Approx(2.5).epsilon(0.02));
  // oracle: explicit Berger chart with fiber scale 1/2, finite differences
  auto fn = [](const Vec& x) { return oracle::berger_clifford(x, 0.5); };
  Vec x(3);
  x << 0.6, 0.2, 1.3;
  Vec hor(3), ver(3), hor2(3);
  ver << 0, 1, 1;
  double c2 = std::pow(std::cos(0.6), 2), s2 = 1 - c2;
  hor << 1, 0, 0;
  hor2 << 0, s2, -c2;  // orthogonal to the fiber
  CHECK(oracle::sectional_fd(fn, x, hor, hor2) == doctest::Approx(2.5).epsilon(1e-5));
  CHECK(oracle::sectional_fd(fn, x, hor, ver) == doctest::Approx(0.5).epsilon(1e-5));
}
