#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "clab/gh.hpp"
#include "clab/sampling.hpp"

using namespace clab;

namespace {
constexpr double kPi = std::numbers::pi;

FiniteMetricSpace from_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  FiniteMetricSpace D;
  const int n = static_cast<int>(rows.size());
  D.d = Mat(n, n);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) D.d(i, j++) = v;
    ++i;
  }
  return D;
}

// Euclidean distances of random points in the plane
FiniteMetricSpace random_space(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Mat P(n, 2);
  for (int i = 0; i < n; ++i) P.row(i) << U(rng), U(rng);
  FiniteMetricSpace D;
  D.d = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) D.d(i, j) = (P.row(i) - P.row(j)).norm();
  return D;
}

FiniteMetricSpace unit_s2_sample(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0, 1);
  std::vector<Eigen::Vector3d> x(n);
  for (auto& v : x) v = Eigen::Vector3d(N(rng), N(rng), N(rng)).normalized();
  FiniteMetricSpace D;
  D.d = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) D.d(i, j) = i == j ? 0.0 : std::acos(std::clamp(x[i].dot(x[j]), -1.0, 1.0));
  return D;
}

double max_min(const FiniteMetricSpace& D, const std::vector<int>& S) {
  double r = 0;
  for (int i = 0; i < D.size(); ++i) {
    double m = 1e300;
    for (int s : S) m = std::min(m, D(i, s));
    r = std::max(r, m);
  }
  return r;
}
}  // namespace

TEST_CASE("validate_metric") {
  CHECK_FALSE(validate_metric(from_matrix({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}})).has_value());
  auto bad = validate_metric(from_matrix({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}));
  REQUIRE(bad.has_value());
  CHECK(bad->kind == "triangle");
  CHECK(bad->amount == doctest::Approx(1.0));
  auto asym = validate_metric(from_matrix({{0, 1}, {1.1, 0}}));
  REQUIRE(asym.has_value());
  CHECK(asym->kind == "symmetry");
  auto s2 = std::make_shared<Sphere>(2);
  FiniteMetricSpace G = geodesic_distances(*round_sphere_metric(s2), sample_manifold(*s2, 150, 1), 10);
  CHECK_FALSE(validate_metric(G).has_value());
}

TEST_CASE("epsilon nets") {
  FiniteMetricSpace tet = from_matrix({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
  CHECK(epsilon_net(tet, 0.5).indices.size() == 4);
  CHECK(epsilon_net(tet, 1.0).indices.size() == 1);
  CHECK_THROWS(epsilon_net(tet, 0.0));

  FiniteMetricSpace S = unit_s2_sample(200, 2);
  NetWitness w = epsilon_net(S, 0.5);
  CHECK(max_min(S, w.indices) <= 0.5);
  CHECK(cover_radius(S, w.indices) == max_min(S, w.indices));
  // cap counting: eps/2-caps around net points are disjoint, eps-caps cover
  const double upper = 2.0 / (1.0 - std::cos(0.25)), lower = 2.0 / (1.0 - std::cos(0.5));
  CHECK(static_cast<double>(w.indices.size()) <= std::min(80.0, upper));
  CHECK(w.indices.size() >= 20);
  CHECK(static_cast<double>(w.indices.size()) >= 0.8 * lower);
  for (size_t a = 0; a < w.indices.size(); ++a)
    for (size_t b = a + 1; b < w.indices.size(); ++b) CHECK(S(w.indices[a], w.indices[b]) > 0.5);
}

TEST_CASE("pair distortion") {
  std::mt19937_64 rng(3);
  FiniteMetricSpace X = random_space(rng, 6);
  std::vector<int> id{0, 1, 2, 3, 4, 5};
  CHECK(pair_distortion(X, X, id, id) == 0.0);
  FiniteMetricSpace Y{1.3 * X.d};
  CHECK(pair_distortion(X, Y, id, id) == doctest::Approx(0.3 * X.d.maxCoeff()).epsilon(1e-14));
  CHECK(pair_distortion(Y, X, id, id) == pair_distortion(X, Y, id, id));
  CHECK_THROWS(pair_distortion(X, Y, {0, 1}, {0}));
}

TEST_CASE("brute force oracle") {
  FiniteMetricSpace pt = from_matrix({{0}});
  FiniteMetricSpace two = from_matrix({{0, 2}, {2, 0}});
  CHECK(gh_brute_force(pt, two) == 1.0);
  CHECK(gh_brute_force(two, two) == 0.0);
  FiniteMetricSpace a = from_matrix({{0, 1, 1.5}, {1, 0, 1.2}, {1.5, 1.2, 0}});
  FiniteMetricSpace b = from_matrix({{0, 1, 1.9}, {1, 0, 1.2}, {1.9, 1.2, 0}});
  CHECK(gh_brute_force(a, b) == doctest::Approx(0.2).epsilon(1e-12));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    FiniteMetricSpace X = random_space(rng, 2 + k % 5);
    CHECK(gh_brute_force(pt, X) == doctest::Approx(0.5 * X.d.maxCoeff()).epsilon(1e-14));
  }
  CHECK_THROWS(gh_brute_force(random_space(rng, 7), pt));
}

TEST_CASE("upper bound soundness") {
  std::mt19937_64 rng(5);
  double slack = 0;
  for (int k = 0; k < 50; ++k) {
    FiniteMetricSpace X = random_space(rng, 1 + k % 5), Y = random_space(rng, 1 + (k / 5) % 5);
    double exact = gh_brute_force(X, Y);
    GhSearchOptions o;
    o.iterations = 400;
    GhResult r = gh_upper_bound(X, Y, 0.05, o, k);
    CHECK(r.bound >= exact - 1e-12);
    // the witness is itself an (eps, delta)-approximation
    WitnessCheck c = verify_witness(X, Y, r.witness);
    CHECK(c.valid);
    CHECK(r.bound == doctest::Approx(2 * r.witness.eps + r.witness.delta).epsilon(1e-15));
    slack += r.bound - exact;
  }
  MESSAGE("mean slack " << slack / 50);
  FiniteMetricSpace X = random_space(rng, 30);
  GhResult same = gh_upper_bound(X, X, 0.1, {}, 1);
  CHECK(same.bound <= 0.2 + 1e-15);
  FiniteMetricSpace pt = from_matrix({{0}});
  GhResult one = gh_upper_bound(pt, X, 0.1, {}, 1);
  CHECK(one.bound >= 0.5 * X.d.maxCoeff());
}

TEST_CASE("longer searches never do worse") {
  std::mt19937_64 rng(6);
  FiniteMetricSpace X = random_space(rng, 60), Y = random_space(rng, 50);
  double prev = 1e300;
  for (int it : {0, 100, 1000, 5000}) {
    GhSearchOptions o;
    o.iterations = it;
    GhResult r = gh_upper_bound(X, Y, 0.08, o, 11);
    CHECK(r.witness.delta <= prev);
    prev = r.witness.delta;
  }
}

TEST_CASE("close spaces admit 5 eps approximations") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  int found = 0, tried = 0;
  for (int k = 0; k < 20; ++k) {
    FiniteMetricSpace X = random_space(rng, 3 + k % 3);
    // perturb the distances a little and close up into a metric
    FiniteMetricSpace Y{X.d};
    for (int i = 0; i < Y.size(); ++i)
      for (int j = i + 1; j < Y.size(); ++j) Y.d(i, j) = Y.d(j, i) = Y.d(i, j) * (1 + 0.05 * std::abs(N(rng)));
    for (int m = 0; m < Y.size(); ++m)
      for (int i = 0; i < Y.size(); ++i)
        for (int j = 0; j < Y.size(); ++j) Y.d(i, j) = std::min(Y.d(i, j), Y.d(i, m) + Y.d(m, j));
    double dgh = gh_brute_force(X, Y);
    double eps = dgh + 0.01;
    ++tried;
    auto w = find_approximation(X, Y, 5 * eps);
    REQUIRE(w.has_value());
    WitnessCheck c = verify_witness(X, Y, *w);
    CHECK(c.valid);
    CHECK(w->delta < 5 * eps);
    ++found;
  }
  CHECK(found == tried);
}

TEST_CASE("leaf space samples") {
  QuotientSample h = quotient_sample(foliated_model("hopf-s3"), 150, 1);
  CHECK_FALSE(validate_metric(h.D).has_value());
  CHECK(diameter_estimate(h.D) == doctest::Approx(kPi / 2).epsilon(0.1));
  QuotientSample t = quotient_sample(foliated_model("t2-s3"), 40, 2, 6);
  CHECK_FALSE(validate_metric(t.D).has_value());
  CHECK(diameter_estimate(t.D) == doctest::Approx(kPi / 2).epsilon(0.15));
  QuotientSample s = quotient_sample(foliated_model("single-leaf-s2"), 50, 3);
  CHECK(s.D.size() == 1);
  CHECK(s.D(0, 0) == 0.0);
  QuotientSample f = quotient_sample(foliated_model("flat-t3-torus"), 40, 4);
  CHECK(diameter_estimate(f.D) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("leaf graph distances") {
  FoliatedModel m = foliated_model("hopf-s3");
  QuotientSample q = quotient_sample(m, 60, 5);
  LeafPoints lp = leaf_points(m, q.leaves, 6, 6);
  REQUIRE(lp.points.size() == 360);
  for (double d : {1.0, 0.1}) {
    MetricPtr g = shrink_vertical(m, d);
    FiniteMetricSpace D = leaf_graph_distances(m, *g, lp, 10);
    CHECK_FALSE(validate_metric(D).has_value());
    // neighbours on a fiber of length 2 pi delta
    double arc = 0;
    for (int i = 0; i + 1 < 6; ++i) arc = std::max(arc, D(i, i + 1));
    CHECK(arc == doctest::Approx(2 * kPi * d / 6).epsilon(0.01));
  }
}

TEST_CASE("Berger spheres approach the leaf space") {
  FoliatedModel m = foliated_model("hopf-s3");
  QuotientSample q = quotient_sample(m, 120, 1, 16);
  LeafPoints lp = leaf_points(m, q.leaves, 6, 2);
  GhSearchOptions o;
  o.hint = lp.leaf;
  o.iterations = 2000;
  std::vector<double> bounds;
  for (double d : {0.5, 0.1, 0.01}) {
    FiniteMetricSpace X = leaf_graph_distances(m, *shrink_vertical(m, d), lp, 12);
    bounds.push_back(gh_upper_bound(X, q.D, 0.05, o, 7).bound);
  }
  CHECK(bounds[1] < bounds[0]);
  CHECK(bounds[2] < bounds[1]);
  CHECK(bounds[2] <= 0.35);
}
