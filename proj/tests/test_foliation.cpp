#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "clab/cheeger.hpp"
#include "clab/foliation.hpp"
#include "clab/sampling.hpp"

using namespace clab;

namespace {
constexpr double kPi = std::numbers::pi;

Vec randn(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0, 1);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

double norm2(const MetricField& g, const Point& p, const Vec& v) { return v.dot(metric_eval(g, p) * v); }
}  // namespace

TEST_CASE("shrink at delta 1 is the identity") {
  for (const std::string id : {"hopf-s3", "flat-t3-circle", "flat-t3-torus", "single-leaf-s2"}) {
    FoliatedModel m = foliated_model(id);
    MetricPtr g1 = shrink_vertical(m, 1.0);
    for (const Point& p : m.scan_samples(10, 3).points)
      CHECK((metric_eval(*g1, p) - metric_eval(*m.metric, p)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK_THROWS(shrink_vertical(foliated_model("hopf-s3"), 0.0));
  CHECK_THROWS(shrink_vertical(foliated_model("hopf-s3"), 1.5));
  CHECK_THROWS(shrink_vertical(foliated_model("t2-s3"), 0.5));
}

TEST_CASE("Hopf shrink is the Berger metric") {
  FoliatedModel m = foliated_model("hopf-s3");
  std::mt19937_64 rng(4);
  for (double d : {0.9, 0.5, 0.1}) {
    MetricPtr gd = shrink_vertical(m, d);
    // same metric from the Cheeger deformation with 1/(1+t) = delta^2
    CheegerContext c(m.action, m.metric, 1.0 / (d * d) - 1.0);
    MetricPtr gt = deformed_metric(c);
    for (const Point& p : m.scan_samples(8, 5).points) {
      Vec u = m.vertical->eval(p.patch, p.coords).col(0);
      CHECK(norm2(*gd, p, u) / norm2(*m.metric, p, u) == doctest::Approx(d * d).epsilon(1e-12));
      CHECK((metric_eval(*gd, p) - metric_eval(*gt, p)).cwiseAbs().maxCoeff() < 1e-12);
      // horizontal vectors untouched
      Mat G = metric_eval(*m.metric, p);
      Vec h = randn(rng, 3);
      h -= u * (u.dot(G * h) / u.dot(G * u));
      CHECK(norm2(*gd, p, h) == doctest::Approx(norm2(*m.metric, p, h)).epsilon(1e-12));
    }
  }
  // curvature against the explicit Berger chart: horizontal planes 4 - 3 delta^2
  double d = 0.5;
  auto fn = [d](const Vec& x) { return oracle::berger_clifford(x, d * d); };
  Vec x(3), hor(3), hor2(3), ver(3);
  x << 0.7, 0.4, 2.0;
  double c2 = std::pow(std::cos(0.7), 2), s2 = 1 - c2;
  hor << 1, 0, 0;
  hor2 << 0, s2, -c2;
  ver << 0, 1, 1;
  CHECK(oracle::sectional_fd(fn, x, hor, hor2) == doctest::Approx(4 - 3 * d * d).epsilon(1e-5));
  CHECK(oracle::sectional_fd(fn, x, hor, ver) == doctest::Approx(d * d).epsilon(1e-5));
}

TEST_CASE("single leaf: global rescale") {
  FoliatedModel m = foliated_model("single-leaf-s2");
  std::mt19937_64 rng(6);
  for (double d : {0.5, 0.1}) {
    MetricPtr gd = shrink_vertical(m, d);
    for (const Point& p : m.scan_samples(6, 7).points) {
      CHECK((metric_eval(*gd, p) - d * d * metric_eval(*m.metric, p)).cwiseAbs().maxCoeff() < 1e-12);
      Vec v = randn(rng, 2), w = randn(rng, 2);
      CHECK(sectional_curvature(*gd, p, v, w) == doctest::Approx(1.0 / (d * d)).epsilon(1e-8));
    }
  }
}

TEST_CASE("variation identities") {
  FoliatedModel hopf = foliated_model("hopf-s3");
  Point p = hopf.scan_samples(1, 8).points[0];
  // delta = 1 endpoint: horizontal identity reduces to Sec(g)
  VariationResiduals r1 = variation_identity_residuals(hopf, 1.0, p, 1);
  REQUIRE(r1.horizontal.available);
  CHECK(std::abs(r1.horizontal.first_order_residual) <= 1e-6);
  CHECK(r1.horizontal.direct == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_FALSE(r1.vertical.available);
  for (double d : {0.9, 0.5, 0.1}) {
    VariationResiduals r = variation_identity_residuals(hopf, d, p, 2);
    // direct values from the Berger closed forms
    CHECK(r.horizontal.direct == doctest::Approx(4 - 3 * d * d).epsilon(1e-7));
    CHECK(r.mixed.direct == doctest::Approx(d * d).epsilon(1e-7));
    CHECK(std::abs(r.horizontal.corrected_residual) < 1e-7);
    CHECK(std::abs(r.mixed.corrected_residual) < 1e-7);
    // first-power interpolation does not reproduce the curvature
    CHECK(std::abs(r.horizontal.first_order_residual) > 1e-2);
    CHECK(r.horizontal.fitted_exponent == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.mixed.fitted_exponent == doctest::Approx(2.0).epsilon(1e-6));
  }
  // flat leaves in a flat torus: everything vanishes
  FoliatedModel t3 = foliated_model("flat-t3-torus");
  for (double d : {0.5, 0.1, 0.01}) {
    VariationResiduals r = variation_identity_residuals(t3, d, t3.scan_samples(1, 9).points[0], 3);
    REQUIRE(r.vertical.available);
    CHECK(std::abs(r.vertical.direct) <= 1e-8);
    CHECK(std::abs(r.vertical.first_order_residual) <= 1e-8);
    CHECK(std::abs(r.vertical.corrected_residual) <= 1e-8);
  }
}

TEST_CASE("leaf curvature of Clifford tori") {
  FoliatedModel m = foliated_model("t2-s3");
  auto s3 = std::dynamic_pointer_cast<const Sphere>(m.metric->manifold());
  REQUIRE(s3);
  std::mt19937_64 rng(10);
  for (double s : {0.3, 0.7, 1.2}) {
    Point p = s3_point_from_clifford(*s3, s, 0.4, 1.9);
    Mat V = m.vertical->eval(p.patch, p.coords);
    CHECK(std::abs(leaf_sectional_curvature(m, p, V.col(0), V.col(1))) < 1e-8);
    // Gauss equation cross-check: ambient K = 1 minus the second fundamental form term
    CHECK(sectional_curvature(*m.metric, p, V.col(0), V.col(1)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("foliated partition of unity") {
  FoliatedModel m = foliated_model("t2-s3");
  auto s3 = std::dynamic_pointer_cast<const Sphere>(m.metric->manifold());
  // cover order: tube around |z2| = 0, tube around |z1| = 0, regular part
  auto w = [&](double s) { return partition_of_unity(m, s3_point_from_clifford(*s3, s, 0.3, 1.1)); };
  auto deep = w(0.005);
  CHECK(deep[0] == 1.0);
  CHECK(deep[1] == 0.0);
  CHECK(deep[2] == 0.0);
  auto other = w(kPi / 2 - 0.002);
  CHECK(other[1] == 1.0);
  CHECK(other[0] == 0.0);
  auto far = w(0.8);
  CHECK(far[2] == 1.0);
  CHECK(far[0] + far[1] == 0.0);
  for (double s : {0.015, 0.02, 0.025}) {
    auto mid = w(s);
    CHECK(mid[0] > 0.0);
    CHECK(mid[0] < 1.0);
    CHECK(mid[2] > 0.0);
    CHECK(std::abs(mid[0] + mid[1] + mid[2] - 1.0) <= 1e-12);
  }
  for (const Point& p : m.scan_samples(30, 11).points) {
    auto ph = partition_of_unity(m, p);
    CHECK(std::abs(ph[0] + ph[1] + ph[2] - 1.0) <= 1e-12);
    CHECK(partition_leaf_variation(m, p, 12) <= 1e-9);
  }
}

TEST_CASE("singular collapse metric") {
  FoliatedModel m = foliated_model("t2-s3");
  auto s3 = std::dynamic_pointer_cast<const Sphere>(m.metric->manifold());
  CHECK_THROWS(singular_collapse_metric(m, 0.5));
  CHECK_NOTHROW(singular_collapse_metric(m, kDeltaMax));
  std::mt19937_64 rng(12);
  for (double d : {kDeltaMax, 0.1, 0.01}) {
    const double L2 = std::log(d) * std::log(d);
    MetricPtr gd = singular_collapse_metric(m, d);
    // deep regular region: orbit block by delta^2 log^2, normal by log^2
    Point p = s3_point_from_clifford(*s3, 0.7, 1.0, 2.0);
    Mat V = m.vertical->eval(p.patch, p.coords);
    Mat G = metric_eval(*m.metric, p);
    for (int k = 0; k < 2; ++k)
      CHECK(norm2(*gd, p, V.col(k)) / norm2(*m.metric, p, V.col(k)) == doctest::Approx(d * d * L2).epsilon(1e-10));
    Vec nrm = randn(rng, 3);
    nrm -= V * (V.transpose() * G * V).ldlt().solve(V.transpose() * G * nrm);
    CHECK(norm2(*gd, p, nrm) / norm2(*m.metric, p, nrm) == doctest::Approx(L2).epsilon(1e-10));
    // on the singular circle |z2| = 0: weight 1 on its tube, rho = delta^1
    Point q = s3_point_from_clifford(*s3, 0.0, 0.5, 0.0);
    Vec u = m.vertical->eval(q.patch, q.coords).col(0);
    REQUIRE(u.norm() > 0.1);
    CHECK(norm2(*gd, q, u) / norm2(*m.metric, q, u) == doctest::Approx(d * d * L2).epsilon(1e-10));
  }
  // log-ratio profile: rho = 1 where the weight is 1
  SingularOptions opt;
  opt.rho = RhoProfile::LogRatio;
  FoliatedModel mp = foliated_model("t2-s3", opt);
  MetricPtr gp = singular_collapse_metric(mp, 0.01);
  Point q = s3_point_from_clifford(*s3, 0.0, 0.5, 0.0);
  Vec u = mp.vertical->eval(q.patch, q.coords).col(0);
  CHECK(norm2(*gp, q, u) / norm2(*mp.metric, q, u) == doctest::Approx(std::pow(std::log(0.01), 2)).epsilon(1e-10));
  // tubes must be disjoint
  SingularOptions bad;
  bad.outer_radius = 1.0;
  CHECK_THROWS(foliated_model("t2-s3", bad));
}

TEST_CASE("equidistant leaves") {
  FoliatedModel hopf = foliated_model("hopf-s3");
  std::mt19937_64 rng(13);
  for (const Point& p : hopf.scan_samples(4, 14).points) {
    Mat G = metric_eval(*hopf.metric, p);
    Vec u = hopf.vertical->eval(p.patch, p.coords).col(0);
    Vec n = randn(rng, 3);
    n -= u * (u.dot(G * n) / u.dot(G * u));
    n /= std::sqrt(n.dot(G * n));
    CHECK(equidistance_spread(hopf, p, n, 0.05, 12) <= 0.02);
  }
  FoliatedModel t2 = foliated_model("t2-s3");
  auto s3 = std::dynamic_pointer_cast<const Sphere>(t2.metric->manifold());
  Point p = s3_point_from_clifford(*s3, 0.6, 0.2, 0.9);
  Point p2 = s3_point_from_clifford(*s3, 0.6 + 1e-6, 0.2, 0.9);
  Vec n = *s3->difference(p, p2);
  Mat G = metric_eval(*t2.metric, p);
  n /= std::sqrt(n.dot(G * n));
  CHECK(equidistance_spread(t2, p, n, 0.05, 8) <= 0.02);
}

TEST_CASE("volume decay fit") {
  std::vector<double> ds{0.3, 0.1, 0.03, 0.01, 0.003, 0.001}, vs;
  for (double d : ds) vs.push_back(2.5 * d * d * std::pow(std::abs(std::log(d)), 3));
  DecayFit f = volume_decay_fit(ds, vs);
  CHECK(f.ell == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.m == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f.log_c == doctest::Approx(std::log(2.5)).epsilon(1e-9));
  DecayFit g = volume_decay_fit(ds, vs, 3.0);
  CHECK(g.m_fixed);
  CHECK(g.ell == doctest::Approx(2.0).epsilon(1e-9));
  // fewer than four rows, or less than two decades
  CHECK_THROWS(volume_decay_fit({0.1, 0.01, 0.001}, {1, 2, 3}));
  CHECK_THROWS(volume_decay_fit({0.1, 0.09, 0.08, 0.07}, {1, 2, 3, 4}));
}

TEST_CASE("regular collapse scans") {
  CollapseBudget b;
  b.curvature_points = 12;
  b.planes_per_point = 4;
  b.distance_points = 400;
  b.volume_resolution = 8;
  FoliatedModel hopf = foliated_model("hopf-s3");
  CollapseReport r = collapse_scan(hopf, CollapseMode::Regular, {0.01, 1.0, 0.1, 0.5}, b, 1);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows.front().delta == 1.0);
  for (size_t i = 0; i < r.rows.size(); ++i) {
    const CollapseRow& row = r.rows[i];
    CHECK(row.max_abs_K <= 4.05);
    CHECK(row.min_K >= row.delta * row.delta - 1e-6);
    // vol(S^3, g_delta) = 2 pi^2 delta
    CHECK(row.volume == doctest::Approx(2 * kPi * kPi * row.delta).epsilon(1e-3));
    if (i > 0) CHECK(row.volume < r.rows[i - 1].volume);
  }
  CHECK(r.rows.back().diameter == doctest::Approx(kPi / 2).epsilon(0.1));
  CHECK_FALSE(r.fit.has_value());

  CollapseReport v = collapse_scan(hopf, CollapseMode::Regular, {0.5, 0.1, 0.03, 0.01, 0.001},
                                   CollapseBudget{4, 2, 100, 8, 8, false}, 2);
  REQUIRE(v.fit.has_value());
  CHECK(v.fit->ell == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::abs(v.fit->m) < 0.05);

  FoliatedModel t3 = foliated_model("flat-t3-circle");
  CollapseReport f = collapse_scan(t3, CollapseMode::Regular, {1.0, 0.1, 0.01, 0.001},
                                   CollapseBudget{10, 4, 100, 8, 6, false}, 3);
  for (const CollapseRow& row : f.rows) CHECK(row.max_abs_K <= 1e-6);
}

TEST_CASE("singular collapse scan") {
  FoliatedModel m = foliated_model("t2-s3");
  CollapseBudget b;
  b.diameter = false;
  CollapseReport r = collapse_scan(m, CollapseMode::Singular, {kDeltaMax, 0.1, 0.03, 0.01, 0.003, 0.001}, b, 5);
  REQUIRE(r.fit.has_value());
  CHECK(r.fit->ell >= 1.7);
  CHECK(r.fit->ell <= 2.3);
  for (size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].volume < r.rows[i - 1].volume);
  CHECK(r.rows.back().max_abs_K < 10 * r.rows.front().max_abs_K);
  CHECK_THROWS(collapse_scan(m, CollapseMode::Singular, {0.5}, b, 5));
}
