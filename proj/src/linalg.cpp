#include "clab/linalg.hpp"

#include <algorithm>

namespace clab {

Mat pinv_psd(const Mat& A, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  const Vec& ev = es.eigenvalues();
  double scale = ev.size() ? std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff())) : 0.0;
  Vec inv = Vec::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > rel_tol * scale && ev(i) > 0.0) inv(i) = 1.0 / ev(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Mat& A) {
  if (A.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat orthogonal_complement(const Mat& G, const Mat& V, double rel_tol) {
  const Eigen::Index n = G.rows();
  // G-orthonormal basis of the full space via Cholesky, then project out span(V).
  Eigen::LLT<Mat> llt(G);
  Mat L = llt.matrixL();
  // In coordinates y = L^T x the metric is Euclidean.
  Mat W = L.transpose() * V;
  Mat P = Mat::Identity(n, n);
  if (W.cols() > 0) {
    Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeFullU);
    const Vec& s = svd.singularValues();
    double smax = s.size() ? s.maxCoeff() : 0.0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > rel_tol * std::max(smax, 1e-300)) ++r;
    Mat U = svd.matrixU();
    Mat comp = U.rightCols(n - r);
    return L.transpose().triangularView<Eigen::Upper>().solve(comp);
  }
  return L.transpose().triangularView<Eigen::Upper>().solve(P);
}

}  // namespace clab
