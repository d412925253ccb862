#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "clab/curvature.hpp"
#include "clab/geodesic.hpp"
#include "clab/metric_field.hpp"
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
class Berger : public MetricFieldT<Berger> {
 public:
  Berger(ManifoldPtr m, double l) : MetricFieldT(std::move(m)), l_(l) {}
  std::string describe() const override { return "berger"; }
  template <class T> MatT<T> evaluate(int, const VecT<T>& x) const {
    T c2 = cos(x(0)) * cos(x(0)), s2 = sin(x(0)) * sin(x(0));
    MatT<T> G = MatT<T>::Zero(3, 3);
    G(0, 0) = T(1.0);
    G(1, 1) = c2 - (1 - l_) * c2 * c2;
    G(2, 2) = s2 - (1 - l_) * s2 * s2;
    G(1, 2) = G(2, 1) = -(1 - l_) * c2 * s2;
    return G;
  }
  double l_;
};
}  // namespace

TEST_CASE("dual numbers carry exact first and mixed second derivatives") {
  // f(x,y) = sin(x) * exp(x*y), compare against hand derivatives
  double x = 0.7, y = -0.3;
  HyperDual X = seed2(x, 1, 0), Y = seed2(y, 0, 1);
  HyperDual f = sin(X) * exp(X * Y);
  double e = std::exp(x * y);
  CHECK(hd_value(f) == doctest::Approx(std::sin(x) * e).epsilon(1e-15));
  CHECK(hd_da(f) == doctest::Approx(std::cos(x) * e + std::sin(x) * y * e).epsilon(1e-14));
  CHECK(hd_db(f) == doctest::Approx(std::sin(x) * x * e).epsilon(1e-14));
  double fxy = std::cos(x) * x * e + std::sin(x) * e + std::sin(x) * y * x * e;
  CHECK(hd_dab(f) == doctest::Approx(fxy).epsilon(1e-14));
  HyperDual g = atan2(Y, X) + sqrt(X * X + 1.0) + pow(X, 2.5) + asin(Y) + log(X);
  double h = 1e-6;
  auto fd = [](double a, double b) { return std::atan2(b, a) + std::sqrt(a * a + 1) + std::pow(a, 2.5) + std::asin(b) + std::log(a); };
  CHECK(hd_da(g) == doctest::Approx((fd(x + h, y) - fd(x - h, y)) / (2 * h)).epsilon(1e-8));
  CHECK(hd_db(g) == doctest::Approx((fd(x, y + h) - fd(x, y - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("metric_eval on built-ins") {
  auto t2 = std::make_shared<FlatTorus>(2);
  Mat G = metric_eval(*flat_metric(t2), Point{0, Vec::Constant(2, 0.3)});
  CHECK((G - Mat::Identity(2, 2)).norm() == 0.0);

  auto s2 = std::make_shared<Sphere>(2);
  G = metric_eval(*round_sphere_metric(s2), Point{0, Vec::Zero(2)});
  CHECK((G - 4 * Mat::Identity(2, 2)).norm() < 1e-15);

  // Clifford patch against the pullback of the Euclidean metric of R^4
  auto cl = std::make_shared<CliffordS3>();
  Vec x(3);
  x << 0.4, 1.1, 2.3;
  Mat pb = oracle::pullback_fd([](const Vec& y) { return CliffordS3::to_embedding<double>(y); }, x);
  CHECK((metric_eval(*clifford_round_metric(cl), Point{0, x}) - pb).cwiseAbs().maxCoeff() < 1e-8);

  // stereographic S^3 against pullback as well
  auto s3 = std::make_shared<Sphere>(3);
  Vec y(3);
  y << 0.2, -0.5, 0.9;
  for (int patch : {0, 1}) {
    Mat pb3 = oracle::pullback_fd([patch](const Vec& c) { return Sphere::to_embedding<double>(patch, c); }, y);
    CHECK((metric_eval(*round_sphere_metric(s3), Point{patch, y}) - pb3).cwiseAbs().maxCoeff() < 1e-8);
  }

  CHECK_THROWS(metric_eval(*round_sphere_metric(s2), Point{0, Vec::Constant(2, 3.0)}));
}

TEST_CASE("curvature tensor examples") {
  auto t3 = std::make_shared<FlatTorus>(3);
  CurvatureData c = curvature_tensor(*flat_metric(t3), Point{0, Vec::Constant(3, 0.2)});
  CHECK(c.R.max_abs() < 1e-10);

  auto s2 = std::make_shared<Sphere>(2);
  auto g = round_sphere_metric(s2);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Point p = s2->canonical(s2->sample_reference(rng));
    CurvatureData cs = curvature_tensor(*g, p);
    CHECK(std::abs(cs.R(0, 1, 0, 1) - cs.g.determinant()) < 1e-6 * cs.g.determinant());
  }

  auto disk = std::make_shared<DiskPatch>();
  auto h = poincare_metric(disk);
  CHECK(sectional_curvature(*h, Point{0, Vec::Zero(2)}, Vec::Unit(2, 0), Vec::Unit(2, 1)) ==
        doctest::Approx(-1.0).epsilon(1e-6));
  Vec q(2);
  q << 0.3, -0.2;
  CHECK(sectional_curvature(*h, Point{0, q}, Vec::Unit(2, 0), Vec::Unit(2, 1)) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("sectional curvature examples and oracle agreement") {
  std::mt19937_64 rng(11);
  auto s3 = std::make_shared<Sphere>(3);
  auto g = round_sphere_metric(s3);
  for (int i = 0; i < 5; ++i) {
    Point p = s3->canonical(s3->sample_reference(rng));
    CHECK(sectional_curvature(*g, p, randn(rng, 3), randn(rng, 3)) == doctest::Approx(1.0).epsilon(1e-5));
  }
  auto s2 = std::make_shared<Sphere>(2);
  auto gh = round_sphere_metric(s2, 0.5);
  Point p2 = s2->canonical(s2->sample_reference(rng));
  CHECK(sectional_curvature(*gh, p2, randn(rng, 2), randn(rng, 2)) == doctest::Approx(4.0).epsilon(1e-4));
  auto t2 = std::make_shared<FlatTorus>(2);
  CHECK(std::abs(sectional_curvature(*flat_metric(t2), Point{0, Vec::Constant(2, .5)}, randn(rng, 2), randn(rng, 2))) < 1e-8);

  // Explicit Berger chart: library (dual numbers) vs finite-difference oracle.
  auto cl = std::make_shared<CliffordS3>();
  for (double lam2 : {0.5, 0.1}) {
    Berger B(cl, lam2);
    Vec x(3);
    x << 0.6, 0.3, 1.9;
    for (int t = 0; t < 4; ++t) {
      Vec v = randn(rng, 3), w = randn(rng, 3);
      double lib = sectional_curvature(B, Point{0, x}, v, w);
      double orc = oracle::sectional_fd([lam2](const Vec& y) { return oracle::berger_clifford(y, lam2); }, x, v, w);
      CHECK(lib == doctest::Approx(orc).epsilon(1e-5));
      double fdlib = sectional_curvature(curvature_tensor(B, Point{0, x}, DiffMode::FiniteDifference), v, w);
      CHECK(fdlib == doctest::Approx(lib).epsilon(1e-4));
    }
  }
  CHECK_THROWS(sectional_curvature(*g, Point{0, Vec::Zero(3)}, Vec::Unit(3, 0), 2.0 * Vec::Unit(3, 0)));
}

TEST_CASE("Riemann symmetries and plane invariance") {
  std::mt19937_64 rng(5);
  auto s3 = std::make_shared<Sphere>(3);
  auto cl = std::make_shared<CliffordS3>();
  auto g = round_sphere_metric(s3);
  for (int i = 0; i < 5; ++i) {
    Point p = s3->canonical(s3->sample_reference(rng));
    CurvatureData c = curvature_tensor(*g, p);
    SymmetryResiduals r = symmetry_residuals(c);
    CHECK(r.antisymmetry < 1e-8);
    CHECK(r.pair_symmetry < 1e-8);
    CHECK(r.bianchi < 1e-7);
    CHECK(r.christoffel_asym < 1e-12);
    Vec v = randn(rng, 3), w = randn(rng, 3);
    Mat A = Mat::Random(2, 2) + 2 * Mat::Identity(2, 2);
    Vec v2 = A(0, 0) * v + A(0, 1) * w, w2 = A(1, 0) * v + A(1, 1) * w;
    CHECK(sectional_curvature(c, v2, w2) == doctest::Approx(sectional_curvature(c, v, w)).epsilon(1e-8));
  }
}

TEST_CASE("geodesic distances") {
  auto s2 = std::make_shared<Sphere>(2);
  auto g = round_sphere_metric(s2);
  SampleSet s = sample_manifold(*s2, 1500, 7);
  Vec n(3), sth(3);
  n << 0, 0.6, 0.8;
  s.points[0] = s2->canonical(s2->from_ambient(n));
  s.points[1] = s2->canonical(s2->from_ambient(-n));
  FiniteMetricSpace D = geodesic_distances(*g, s, 10);
  CHECK(D(0, 1) == doctest::Approx(kPi).epsilon(0.05));
  CHECK(D(0, 0) == 0.0);
  CHECK(diameter_estimate(D) == doctest::Approx(kPi).epsilon(0.05));
  CHECK_FALSE(validate_metric(D).has_value());

  auto s2h = round_sphere_metric(s2, 0.5);
  CHECK(diameter_estimate(geodesic_distances(*s2h, s, 10)) == doctest::Approx(kPi / 2).epsilon(0.05));

  auto t2 = std::make_shared<FlatTorus>(2);
  SampleSet st = sample_manifold(*t2, 800, 2);
  st.points[0] = Point{0, Vec::Zero(2)};
  st.points[1] = Point{0, Vec::Constant(2, 0.5)};
  FiniteMetricSpace Dt = geodesic_distances(*flat_metric(t2), st, 10);
  CHECK(Dt(0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(0.05));

  FiniteMetricSpace one = geodesic_distances(*g, std::vector<Point>{s.points[0]}, 5);
  CHECK(diameter_estimate(one) == 0.0);

  // refinement: doubling samples and k lengthens shared distances by at most 3% of the diameter
  SampleSet small = sample_manifold(*s2, 300, 9), big = sample_manifold(*s2, 600, 9);
  FiniteMetricSpace Ds = geodesic_distances(*g, small, 8), Db = geodesic_distances(*g, big, 16);
  double worst = 0;
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 300; ++j) worst = std::max(worst, Db(i, j) - Ds(i, j));
  CHECK(worst <= 0.03 * diameter_estimate(Ds));

  // disconnected: two far clusters with k = 1
  std::vector<Point> pts = {Point{0, Vec::Zero(2)}, Point{0, Vec::Constant(2, 0.01)}, Point{1, Vec::Zero(2)},
                            Point{1, Vec::Constant(2, 0.01)}};
  CHECK_THROWS(geodesic_distances(*g, pts, 1));
}

TEST_CASE("volume estimates") {
  auto t2 = std::make_shared<FlatTorus>(2);
  CHECK(volume_estimate(*flat_metric(t2), grid_torus(*t2, 10)).value == doctest::Approx(1.0).epsilon(0.02));
  CHECK(volume_estimate(*flat_metric(t2), sample_manifold(*t2, 100, 1)).value == doctest::Approx(1.0).epsilon(1e-12));
  auto s2 = std::make_shared<Sphere>(2);
  VolumeEstimate v = volume_estimate(*round_sphere_metric(s2), sample_manifold(*s2, 2000, 4));
  CHECK(v.value == doctest::Approx(4 * kPi).epsilon(0.02));
  auto s3 = std::make_shared<Sphere>(3);
  SampleSet grid = grid_s3_clifford(*s3, {0.0, kPi / 4, kPi / 2}, 8, 3);
  CHECK(volume_estimate(*round_sphere_metric(s3), grid).value == doctest::Approx(2 * kPi * kPi).epsilon(1e-10));
}

TEST_CASE("sampling is deterministic and prefix-stable") {
  auto s3 = std::make_shared<Sphere>(3);
  SampleSet a = sample_manifold(*s3, 50, 42), b = sample_manifold(*s3, 100, 42);
  for (int i = 0; i < 50; ++i) {
    CHECK(a.points[i].patch == b.points[i].patch);
    CHECK((a.points[i].coords - b.points[i].coords).norm() == 0.0);
    CHECK(s3->contains(a.points[i].patch, a.points[i].coords));
  }
}
