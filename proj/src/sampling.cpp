#include "clab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clab {

namespace {
constexpr double kPi = std::numbers::pi;
}

SampleSet sample_manifold(const Manifold& m, int n, std::uint64_t seed) {
  SampleSet s;
  s.seed = seed;
  s.scheme = m.reference_scheme();
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    Point p = m.sample_reference(rng);
    s.points.push_back(p);
  }
  for (const Point& p : s.points) s.weights.push_back(1.0 / (n * m.reference_density(p)));
  return s;
}

SampleSet grid_torus(const FlatTorus& m, int per_dim) {
  SampleSet s;
  s.scheme = "grid";
  s.monte_carlo = false;
  const int k = m.dim();
  const double L = m.period();
  long total = 1;
  for (int i = 0; i < k; ++i) total *= per_dim;
  double w = std::pow(L / per_dim, k);
  for (long idx = 0; idx < total; ++idx) {
    Vec x(k);
    long r = idx;
    for (int i = 0; i < k; ++i) {
      x(i) = (static_cast<double>(r % per_dim) + 0.5) * L / per_dim;
      r /= per_dim;
    }
    s.points.push_back(Point{0, x});
    s.weights.push_back(w);
  }
  return s;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = 0.5 * (a + b) - 0.5 * (b - a) * z;
    w[i] = (b - a) / ((1.0 - z * z) * pp * pp);
  }
}

Point s3_point_from_clifford(const Sphere& s3, double s, double xi1, double xi2) {
  Vec z(4);
  z << std::cos(s) * std::cos(xi1), std::cos(s) * std::sin(xi1), std::sin(s) * std::cos(xi2),
      std::sin(s) * std::sin(xi2);
  return s3.canonical(s3.from_ambient(z));
}

SampleSet grid_s3_clifford(const Sphere& s3, const std::vector<double>& bp, int npp, int n_xi, double xi_offset) {
  if (s3.dim() != 3) throw std::invalid_argument("grid_s3_clifford: needs S^3");
  SampleSet out;
  out.scheme = "grid";
  out.monte_carlo = false;
  std::vector<double> sx, sw;
  for (size_t k = 0; k + 1 < bp.size(); ++k) {
    std::vector<double> x, w;
    gauss_legendre(npp, bp[k], bp[k + 1], x, w);
    sx.insert(sx.end(), x.begin(), x.end());
    sw.insert(sw.end(), w.begin(), w.end());
  }
  const double dxi = 2 * kPi / n_xi;
  for (size_t a = 0; a < sx.size(); ++a)
    for (int i = 0; i < n_xi; ++i)
      for (int j = 0; j < n_xi; ++j) {
        double s = sx[a];
        double xi1 = xi_offset + (i + 0.5) * dxi, xi2 = xi_offset + (j + 0.5) * dxi + 0.37 * dxi;
        Point p = s3_point_from_clifford(s3, s, xi1, xi2);
        // round volume element cos s sin s ds dxi1 dxi2, converted to chart measure
        double w_round = std::cos(s) * std::sin(s) * sw[a] * dxi * dxi;
        double r2 = p.coords.squaredNorm();
        double sqrt_det_round = std::pow(2.0 / (1.0 + r2), 3);
        out.points.push_back(p);
        out.weights.push_back(w_round / sqrt_det_round);
      }
  return out;
}

SampleSet stratified_s3(const Sphere& s3, const std::vector<double>& s_values, std::uint64_t seed) {
  SampleSet out;
  out.seed = seed;
  out.scheme = "stratified";
  out.monte_carlo = false;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 2 * kPi);
  for (double s : s_values) {
    double a = U(rng), b = U(rng);
    out.points.push_back(s3_point_from_clifford(s3, s, a, b));
    out.weights.push_back(0.0);
  }
  return out;
}

}  // namespace clab
