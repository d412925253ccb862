#pragma once
// Independent reference computations used by the tests. Nothing here calls the
// library's differentiation or curvature code.

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using MetricFn = std::function<Mat(const Vec&)>;

// Gamma^l_jk at x by central differences of the metric (step h).
inline std::vector<Mat> christoffel_fd(const MetricFn& g, const Vec& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  std::vector<Mat> dg(n);
  for (int a = 0; a < n; ++a) {
    Vec e = Vec::Unit(n, a) * h;
    // fourth-order stencil
    dg[a] = (-g(x + 2 * e) + 8 * g(x + e) - 8 * g(x - e) + g(x - 2 * e)) / (12 * h);
  }
  Mat gi = g(x).inverse();
  std::vector<Mat> G(n, Mat::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int m = 0; m < n; ++m) s += gi(l, m) * (dg[j](k, m) + dg[k](j, m) - dg[m](j, k));
        G[l](j, k) = 0.5 * s;
      }
  return G;
}

// g(R(v,w)w, v) with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
// via finite differences of the Christoffel symbols.
inline double curvature_form_fd(const MetricFn& g, const Vec& x, const Vec& v, const Vec& w, double h = 1e-3) {
  const int n = static_cast<int>(x.size());
  auto G0 = christoffel_fd(g, x);
  std::vector<std::vector<Mat>> dG(n);
  for (int a = 0; a < n; ++a) {
    Vec e = Vec::Unit(n, a) * h;
    auto p2 = christoffel_fd(g, x + 2 * e), p1 = christoffel_fd(g, x + e);
    auto m1 = christoffel_fd(g, x - e), m2 = christoffel_fd(g, x - 2 * e);
    dG[a].resize(n);
    for (int l = 0; l < n; ++l) dG[a][l] = (-p2[l] + 8 * p1[l] - 8 * m1[l] + m2[l]) / (12 * h);
  }
  // R^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
  auto R = [&](int l, int i, int j, int k) {
    double r = dG[i][l](j, k) - dG[j][l](i, k);
    for (int m = 0; m < n; ++m) r += G0[l](i, m) * G0[m](j, k) - G0[l](j, m) * G0[m](i, k);
    return r;
  };
  Mat gx = g(x);
  Vec Rv = Vec::Zero(n);  // R(v,w)w
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) Rv(l) += R(l, i, j, k) * v(i) * w(j) * w(k);
  return v.dot(gx * Rv);
}

inline double sectional_fd(const MetricFn& g, const Vec& x, const Vec& v, const Vec& w) {
  Mat gx = g(x);
  double gram = v.dot(gx * v) * w.dot(gx * w) - std::pow(v.dot(gx * w), 2);
  return curvature_form_fd(g, x, v, w) / gram;
}

// Pullback of the Euclidean metric through an embedding, Jacobian by central differences.
inline Mat pullback_fd(const std::function<Vec(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  const int n = static_cast<int>(x.size());
  Vec f0 = f(x);
  Mat J(f0.size(), n);
  for (int a = 0; a < n; ++a) {
    Vec e = Vec::Unit(n, a) * h;
    J.col(a) = (f(x + e) - f(x - e)) / (2 * h);
  }
  return J.transpose() * J;
}

// Explicit Berger metric on S^3 in Clifford coordinates (eta, xi1, xi2): the round metric
// with the Hopf direction d/dxi1 + d/dxi2 rescaled by lambda^2.
inline Mat berger_clifford(const Vec& x, double lambda2) {
  double c2 = std::pow(std::cos(x(0)), 2), s2 = std::pow(std::sin(x(0)), 2);
  Mat g = Mat::Zero(3, 3);
  g(0, 0) = 1;
  g(1, 1) = c2;
  g(2, 2) = s2;
  // one-form dual to the unit Hopf field: c2 dxi1 + s2 dxi2
  Vec th(3);
  th << 0, c2, s2;
  g -= (1 - lambda2) * th * th.transpose();
  return g;
}

}  // namespace oracle
