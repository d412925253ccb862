#include "clab/curvature.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace clab {

namespace {

MetricJet jet_dual(const MetricField& field, const Point& p) {
  const int n = field.dim();
  MetricJet J;
  J.g = field(p);
  J.dg.assign(n, Mat::Zero(n, n));
  J.ddg.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      VecT<HyperDual> x(n);
      for (int i = 0; i < n; ++i) x(i) = seed2(p.coords(i), i == a ? 1.0 : 0.0, i == b ? 1.0 : 0.0);
      MatT<HyperDual> G = field.eval(p.patch, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (b == a) J.dg[a](i, j) = hd_da(G(i, j));
          J.ddg[a][b](i, j) = hd_dab(G(i, j));
        }
      if (b != a) J.ddg[b][a] = J.ddg[a][b];
    }
  }
  return J;
}

Mat eval_at(const MetricField& f, const Point& p, const Vec& x) { return f.eval(p.patch, x); }

// Central differences with one Richardson extrapolation level.
MetricJet jet_fd(const MetricField& field, const Point& p) {
  const int n = field.dim();
  const double h = 1e-4;
  MetricJet J;
  J.g = field(p);
  J.dg.assign(n, Mat::Zero(n, n));
  J.ddg.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  const Vec& x0 = p.coords;
  auto e = [n](int i) { return Vec(Vec::Unit(n, i)); };
  auto d1 = [&](int a, double s) {
    return Mat((eval_at(field, p, x0 + s * e(a)) - eval_at(field, p, x0 - s * e(a))) / (2 * s));
  };
  auto d2 = [&](int a, int b, double s) {
    if (a == b)
      return Mat((eval_at(field, p, x0 + s * e(a)) - 2 * J.g + eval_at(field, p, x0 - s * e(a))) / (s * s));
    return Mat((eval_at(field, p, x0 + s * e(a) + s * e(b)) - eval_at(field, p, x0 + s * e(a) - s * e(b)) -
                eval_at(field, p, x0 - s * e(a) + s * e(b)) + eval_at(field, p, x0 - s * e(a) - s * e(b))) /
               (4 * s * s));
  };
  for (int a = 0; a < n; ++a) {
    J.dg[a] = (4.0 * d1(a, h / 2) - d1(a, h)) / 3.0;
    for (int b = a; b < n; ++b) {
      J.ddg[a][b] = (4.0 * d2(a, b, h / 2) - d2(a, b, h)) / 3.0;
      J.ddg[b][a] = J.ddg[a][b];
    }
  }
  return J;
}

}  // namespace

MetricJet metric_jet(const MetricField& field, const Point& p, DiffMode mode) {
  field.manifold()->check(p);
  if (mode == DiffMode::FiniteDifference) {
    const double h = 1e-4;
    if (field.manifold()->boundary_distance(p.patch, p.coords) <= 2 * h)
      throw std::domain_error("differentiation step exits patch box");
    return jet_fd(field, p);
  }
  return jet_dual(field, p);
}

double Riemann::max_abs() const {
  double m = 0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

CurvatureData curvature_from_jet(const Point& p, const MetricJet& J) {
  const int n = static_cast<int>(J.g.rows());
  CurvatureData c;
  c.p = p;
  c.g = J.g;
  c.ginv = J.g.inverse();
  // Christoffel symbols of the first kind: [ij,l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<Mat> first(n, Mat::Zero(n, n));  // first[l](i,j)
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) first[l](i, j) = 0.5 * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j));
  c.christoffel.assign(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double gi = c.ginv(k, l);
      if (gi == 0.0) continue;
      c.christoffel[k] += gi * first[l];
    }
  c.R = Riemann(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          double v = 0.5 * (J.ddg[k][l](i, m) + J.ddg[i][m](k, l) - J.ddg[k][m](i, l) - J.ddg[i][l](k, m));
          // g_np Gamma^n_kl Gamma^p_im = [kl,p] Gamma^p_im
          double q = 0.0;
          for (int s = 0; s < n; ++s)
            q += first[s](k, l) * c.christoffel[s](i, m) - first[s](k, m) * c.christoffel[s](i, l);
          c.R(i, k, l, m) = v + q;
        }
  return c;
}

CurvatureData curvature_tensor(const MetricField& field, const Point& p, DiffMode mode) {
  return curvature_from_jet(p, metric_jet(field, p, mode));
}

double curvature_form(const CurvatureData& c, const Vec& v, const Vec& w) {
  const int n = c.R.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = v(i) * w(j);
      if (a == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += c.R(i, j, k, l) * a * v(k) * w(l);
    }
  return s;
}

double gram_determinant(const Mat& g, const Vec& v, const Vec& w) {
  double vv = v.dot(g * v), ww = w.dot(g * w), vw = v.dot(g * w);
  return vv * ww - vw * vw;
}

double sectional_curvature(const CurvatureData& c, const Vec& v, const Vec& w) {
  double gram = gram_determinant(c.g, v, w);
  double scale = v.dot(c.g * v) * w.dot(c.g * w);
  if (!(gram > 1e-12 * std::max(scale, 1e-300)) || !(gram > 0)) throw std::domain_error("degenerate-plane");
  return curvature_form(c, v, w) / gram;
}

double sectional_curvature(const MetricField& field, const Point& p, const Vec& v, const Vec& w) {
  return sectional_curvature(curvature_tensor(field, p), v, w);
}

SymmetryResiduals symmetry_residuals(const CurvatureData& c) {
  const int n = c.R.dim();
  SymmetryResiduals r;
  double m = c.R.max_abs();
  double s = m > 0 ? 1.0 / m : 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          r.antisymmetry = std::max(r.antisymmetry, std::abs(c.R(i, j, k, l) + c.R(j, i, k, l)) * s);
          r.pair_symmetry = std::max(r.pair_symmetry, std::abs(c.R(i, j, k, l) - c.R(k, l, i, j)) * s);
          r.bianchi = std::max(r.bianchi, std::abs(c.R(i, j, k, l) + c.R(i, k, l, j) + c.R(i, l, j, k)) * s);
        }
  for (const Mat& G : c.christoffel) {
    double gs = std::max(1.0, G.cwiseAbs().maxCoeff());
    r.christoffel_asym = std::max(r.christoffel_asym, (G - G.transpose()).cwiseAbs().maxCoeff() / gs);
  }
  return r;
}

}  // namespace clab

namespace clab {

CurvatureReport curvature_scan(const MetricField& field, const SampleSet& samples, int planes_per_point,
                               std::uint64_t seed, double parameter) {
  CurvatureReport rep;
  rep.parameter = parameter;
  rep.seed = seed;
  const int n = field.dim();
  if (n < 2) return rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto draw = [&] {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = N(rng);
    return v;
  };
  for (int s = 0; s < samples.size(); ++s) {
    CurvatureData c = curvature_tensor(field, samples.points[s]);
    for (int k = 0; k < planes_per_point; ++k) {
      Vec v, w;
      int tries = 0;
      do {
        if (++tries > 17) throw std::domain_error("degenerate-plane");
        v = draw();
        w = draw();
        double scale = v.dot(c.g * v) * w.dot(c.g * w);
        if (gram_determinant(c.g, v, w) > 1e-12 * std::max(1.0, scale)) break;
      } while (true);
      double K = sectional_curvature(c, v, w);
      rep.min_K = std::min(rep.min_K, K);
      rep.max_K = std::max(rep.max_K, K);
      rep.entries.push_back({s, v, w, K});
    }
  }
  return rep;
}

}  // namespace clab
