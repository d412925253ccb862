#pragma once
// Christoffel symbols, Riemann tensor and sectional curvature from a metric field.
//
// Convention: R_{iklm} = 1/2 (g_im,kl + g_kl,im - g_il,km - g_km,il)
//                        + g_np (Gamma^n_kl Gamma^p_im - Gamma^n_km Gamma^p_il),
// so that K(v,w) = R_{ijkl} v^i w^j v^k w^l / (|v|^2 |w|^2 - <v,w>^2).

#include <cstdint>
#include <limits>
#include <vector>

#include "clab/metric_field.hpp"
#include "clab/sampling.hpp"

namespace clab {

enum class DiffMode { Dual, FiniteDifference };

struct MetricJet {
  Mat g;
  std::vector<Mat> dg;                // dg[a] = d_a g
  std::vector<std::vector<Mat>> ddg;  // ddg[a][b] = d_a d_b g
};

MetricJet metric_jet(const MetricField& field, const Point& p, DiffMode mode = DiffMode::Dual);

class Riemann {
 public:
  explicit Riemann(int n) : n_(n), data_(static_cast<size_t>(n) * n * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double operator()(int i, int j, int k, int l) const { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double max_abs() const;

 private:
  int n_;
  std::vector<double> data_;
};

struct CurvatureData {
  Point p;
  Mat g;
  Mat ginv;
  std::vector<Mat> christoffel;  // christoffel[k](i,j) = Gamma^k_ij
  Riemann R{0};
};

CurvatureData curvature_tensor(const MetricField& field, const Point& p, DiffMode mode = DiffMode::Dual);
CurvatureData curvature_from_jet(const Point& p, const MetricJet& jet);

// R(v,w,w,v) in the K(h)(X,Y) := h(R(X,Y)Y,X) sense, not normalized.
double curvature_form(const CurvatureData& c, const Vec& v, const Vec& w);
double gram_determinant(const Mat& g, const Vec& v, const Vec& w);
double sectional_curvature(const CurvatureData& c, const Vec& v, const Vec& w);
double sectional_curvature(const MetricField& field, const Point& p, const Vec& v, const Vec& w);

struct SymmetryResiduals {
  double antisymmetry = 0;   // max |R_ijkl + R_jikl| / max|R|
  double pair_symmetry = 0;  // max |R_ijkl - R_klij| / max|R|
  double bianchi = 0;        // max |R_ijkl + R_iklj + R_iljk| / max|R|
  double christoffel_asym = 0;
};
SymmetryResiduals symmetry_residuals(const CurvatureData& c);

struct CurvatureEntry {
  int sample = 0;
  Vec v, w;
  double K = 0;
};
struct CurvatureReport {
  std::vector<CurvatureEntry> entries;
  double min_K = std::numeric_limits<double>::infinity();
  double max_K = -std::numeric_limits<double>::infinity();
  double parameter = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  double max_abs() const { return std::max(std::abs(min_K), std::abs(max_K)); }
};
// Random planes (Gaussian in chart coordinates) at every sample point. Degenerate draws are
// redrawn up to 16 times. Deterministic in seed; entries ordered by sample index.
CurvatureReport curvature_scan(const MetricField& field, const SampleSet& samples, int planes_per_point,
                               std::uint64_t seed, double parameter = std::numeric_limits<double>::quiet_NaN());

}  // namespace clab
