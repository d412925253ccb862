#pragma once
// Small dense linear algebra that works for double and nested dual scalars.

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "clab/dual.hpp"

namespace clab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
template <class T> using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T> using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
Mat real_part(const MatT<T>& m) {
  Mat out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = real(m(i, j));
  return out;
}

template <class T>
MatT<T> lift(const Mat& m) {
  MatT<T> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = T(m(i, j));
  return out;
}

template <class T>
VecT<T> lift(const Vec& v) {
  VecT<T> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = T(v(i));
  return out;
}

// Solve A X = B by Gaussian elimination with partial pivoting on the value part.
template <class T>
MatT<T> solve(MatT<T> A, MatT<T> B) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n) throw std::invalid_argument("solve: shape mismatch");
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    double best = std::abs(real(A(k, k)));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double c = std::abs(real(A(i, k)));
      if (c > best) { best = c; piv = i; }
    }
    if (best == 0.0) throw std::runtime_error("solve: singular matrix");
    if (piv != k) { A.row(k).swap(A.row(piv)); B.row(k).swap(B.row(piv)); }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      T f = A(i, k) / A(k, k);
      if (real(f) == 0.0 && f == T(0.0)) continue;
      for (Eigen::Index j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      for (Eigen::Index j = 0; j < B.cols(); ++j) B(i, j) -= f * B(k, j);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      T s = B(k, j);
      for (Eigen::Index i = k + 1; i < n; ++i) s -= A(k, i) * B(i, j);
      B(k, j) = s / A(k, k);
    }
  }
  return B;
}

template <class T>
MatT<T> inverse(const MatT<T>& A) {
  return solve<T>(A, MatT<T>::Identity(A.rows(), A.cols()));
}

template <class T>
MatT<T> symmetrize(const MatT<T>& A) {
  MatT<T> S = A;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = i + 1; j < A.cols(); ++j) {
      T m = 0.5 * (A(i, j) + A(j, i));
      S(i, j) = m;
      S(j, i) = m;
    }
  return S;
}

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix (double only).
Mat pinv_psd(const Mat& A, double rel_tol = 1e-10);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& A);

// Orthonormal basis (columns) of the orthogonal complement of span(V) with respect to G.
Mat orthogonal_complement(const Mat& G, const Mat& V, double rel_tol = 1e-10);

}  // namespace clab
