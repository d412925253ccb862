#pragma once
// Foliations given by spanning vertical fields. Two collapsing constructions:
//  - regular foliations: scale the leaf directions by delta^2;
//  - isolated singular strata: a foliated partition of unity glues local regular
//    subfoliations on top of a log(delta)^2 background.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clab/action.hpp"
#include "clab/curvature.hpp"
#include "clab/geodesic.hpp"
#include "clab/submersion.hpp"

namespace clab {

// Columns span a distribution (rank may drop on singular sets).
class Distribution {
 public:
  virtual ~Distribution() = default;
  virtual Mat eval(int patch, const Vec& x) const = 0;
  virtual MatT<Dual1> eval(int patch, const VecT<Dual1>& x) const = 0;
  virtual MatT<HyperDual> eval(int patch, const VecT<HyperDual>& x) const = 0;
  Mat operator()(const Point& p) const { return eval(p.patch, p.coords); }
};
using DistributionPtr = std::shared_ptr<const Distribution>;

// Action fields of the given algebra directions (columns); all of them by default.
DistributionPtr action_distribution(ActionPtr a, Mat directions = Mat());
DistributionPtr constant_distribution(Mat V);

// G + (f2 - 1) * (g-orthogonal projection onto span V)^* G : scales span V by f2,
// keeps its g-orthogonal complement.
template <class T>
MatT<T> scale_block(const MatT<T>& G, const MatT<T>& V, const T& f2) {
  if (V.cols() == 0) return G;
  MatT<T> VtG = V.transpose() * G;
  MatT<T> M = VtG * V;
  MatT<T> r = G + (f2 - 1.0) * (VtG.transpose() * solve<T>(M, VtG));
  return T(0.5) * (r + r.transpose());
}

// One element of the cover used by the singular construction.
class CoverElement {
 public:
  CoverElement(std::string name, DistributionPtr sub) : name_(std::move(name)), sub_(std::move(sub)) {}
  virtual ~CoverElement() = default;
  const std::string& name() const { return name_; }
  const DistributionPtr& subfoliation() const { return sub_; }
  virtual double weight(int patch, const Vec& x) const = 0;
  virtual Dual1 weight(int patch, const VecT<Dual1>& x) const = 0;
  virtual HyperDual weight(int patch, const VecT<HyperDual>& x) const = 0;

 private:
  std::string name_;
  DistributionPtr sub_;
};
using CoverPtr = std::shared_ptr<const CoverElement>;

struct Stratum {
  std::string name;
  int leaf_dim = 0;
  double plateau_radius = 0;  // weight 1 inside
  double outer_radius = 0;    // weight 0 outside
};

enum class RhoProfile {
  Power,    // rho = delta^phi
  LogRatio, // rho = delta^(log phi / log(1/2)), only on supp phi
};

struct SingularOptions {
  double plateau_radius = 0.01;
  double outer_radius = 0.03;
  RhoProfile rho = RhoProfile::Power;
  bool tubes_first = true;
};

struct FoliatedModel {
  std::string id;
  MetricPtr metric;
  DistributionPtr vertical;
  int leaf_dim = 0;
  bool regular = true;
  ActionPtr action;          // leaves are orbits when set
  SubmersionPtr quotient;    // quotient map on the regular part, when available
  std::vector<Stratum> strata;
  std::vector<CoverPtr> cover;  // in construction order
  RhoProfile rho = RhoProfile::Power;
  // leaf through p, parametrized by theta in [0, leaf_periods)^leaf_dim
  std::function<Point(const Point&, const Vec&)> leaf_map;
  Vec leaf_periods;
  // budgets: curvature scan points, volume quadrature
  std::function<SampleSet(int, std::uint64_t)> scan_samples;
  std::function<SampleSet(int)> volume_samples;
  // optional: n points on distinct leaves spread over the leaf space (used for leaf-space samples)
  std::function<std::vector<Point>(int, std::uint64_t)> leaf_representatives;
  int dim() const { return metric->dim(); }
};

std::vector<std::string> foliated_model_ids();
FoliatedModel foliated_model(const std::string& id, const SingularOptions& opt = {});

// delta^2 on leaf directions, identity on their g-orthogonal complement.
MetricPtr shrink_vertical(const FoliatedModel& m, double delta);

struct IdentityCheck {
  bool available = false;
  double direct = 0;      // Sec(g_delta) on the plane, ground truth
  double first_order = 0;     // right-hand side with first-power factors (1 - delta)
  double corrected = 0;   // same with (1 - delta^2)
  double first_order_residual = 0;
  double corrected_residual = 0;
  double fitted_exponent = 0;  // a such that (1 - delta^a) reproduces `direct`; NaN if undetermined
};
struct VariationResiduals {
  IdentityCheck horizontal, mixed, vertical;
};
VariationResiduals variation_identity_residuals(const FoliatedModel& m, double delta, const Point& p,
                                                std::uint64_t seed);

// Intrinsic sectional curvature of the leaf through p on span{V, W} (Gauss equation).
double leaf_sectional_curvature(const FoliatedModel& m, const Point& p, const Vec& V, const Vec& W);

// Weights of the cover elements at p, in construction order.
std::vector<double> partition_of_unity(const FoliatedModel& m, const Point& p);
// Max over leaf samples of |phi_j(q) - phi_j(p)|.
double partition_leaf_variation(const FoliatedModel& m, const Point& p, int count);

constexpr double kDeltaMax = 0.36787944117144233;  // 1/e
MetricPtr singular_collapse_metric(const FoliatedModel& m, double delta);

// Min over the leaf through q of the segment length from x; coarse grid then golden-section refinement.
double distance_to_leaf(const FoliatedModel& m, const MetricField& g, const Point& x, const Point& q, int grid = 24);
// Relative spread (max - min) / mean of dist(p', L_q) for p' on L_p, q = p + h * unit normal.
double equidistance_spread(const FoliatedModel& m, const Point& p, const Vec& normal, double h, int count);

struct CollapseBudget {
  int curvature_points = 40;
  int planes_per_point = 5;
  int distance_points = 600;
  int k_neighbors = 10;
  int volume_resolution = 12;
  bool diameter = true;
};

struct CollapseRow {
  double delta = 0;
  double max_abs_K = 0, min_K = 0, max_K = 0;
  double diameter = 0;
  double volume = 0, volume_std_error = 0;
  double gh_bound = std::numeric_limits<double>::quiet_NaN();
};

struct DecayFit {
  double ell = 0, ell_std_error = 0;
  double m = 0, m_std_error = 0;
  double log_c = 0;
  int rows = 0;
  bool m_fixed = false;
};

struct CollapseReport {
  std::string model;
  std::string mode;  // "regular" or "singular"
  std::vector<CollapseRow> rows;  // delta descending
  std::optional<DecayFit> fit;
};

enum class CollapseMode { Regular, Singular };
using GhHook = std::function<double(const MetricField&, double delta)>;

MetricPtr collapse_metric(const FoliatedModel& m, CollapseMode mode, double delta);
CollapseReport collapse_scan(const FoliatedModel& m, CollapseMode mode, std::vector<double> deltas,
                             const CollapseBudget& budget, std::uint64_t seed, const GhHook& gh = {});

// Least squares  log vol = log C + ell log(delta) + m log|log delta|. Rows with delta >= 1 are skipped.
// With fix_m set, m is held at that value.
DecayFit volume_decay_fit(const std::vector<double>& deltas, const std::vector<double>& volumes,
                          std::optional<double> fix_m = std::nullopt);
DecayFit volume_decay_fit(const CollapseReport& r, std::optional<double> fix_m = std::nullopt);

}  // namespace clab
