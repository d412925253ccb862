#pragma once
// Transformation groupoids G x M => M, groupoid actions along a map alpha: P -> M,
// and the groupoid version of the Cheeger deformation.
//
// Arrows are points of the product chart G x M; (g, x) goes from x to g.x.
// The action of an arrow (g, alpha(p)) on p is g.p, so every groupoid action here
// comes from a G-action on P for which alpha is equivariant.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "clab/action.hpp"
#include "clab/curvature.hpp"
#include "clab/submersion.hpp"

namespace clab {

// Smooth map between built-in manifolds, evaluated on doubles and dual scalars.
class ObjectMap {
 public:
  ObjectMap(ManifoldPtr dom, ManifoldPtr cod) : dom_(std::move(dom)), cod_(std::move(cod)) {}
  virtual ~ObjectMap() = default;
  const ManifoldPtr& domain() const { return dom_; }
  const ManifoldPtr& codomain() const { return cod_; }

  virtual Vec map(int patch, const Vec& x, int out) const = 0;
  virtual VecT<Dual1> map(int patch, const VecT<Dual1>& x, int out) const = 0;
  virtual VecT<HyperDual> map(int patch, const VecT<HyperDual>& x, int out) const = 0;
  virtual VecT<HyperDual3> map(int patch, const VecT<HyperDual3>& x, int out) const = 0;

  Point operator()(const Point& p) const;
  // Jacobian from p's chart into chart `out` of the codomain; T-valued version differentiates once more.
  template <class T>
  MatT<T> jacobian(int patch, const VecT<T>& x, int out) const {
    using D = Dual<T>;
    const Eigen::Index n = x.size();
    MatT<T> J(cod_->dim(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      VecT<D> xd(n);
      for (Eigen::Index i = 0; i < n; ++i) xd(i) = D(x(i), T(i == j ? 1.0 : 0.0));
      VecT<D> y = map(patch, xd, out);
      for (Eigen::Index i = 0; i < y.size(); ++i) J(i, j) = y(i).d;
    }
    return J;
  }
  Mat jacobian(const Point& p, int out) const { return jacobian<double>(p.patch, p.coords, out); }

 private:
  ManifoldPtr dom_, cod_;
};

using ObjectMapPtr = std::shared_ptr<const ObjectMap>;

// Derived provides `template <class T> VecT<T> apply(int patch, const VecT<T>& x, int out) const`.
template <class Derived>
class ObjectMapT : public ObjectMap {
 public:
  using ObjectMap::ObjectMap;
  using ObjectMap::jacobian;
  Vec map(int p, const Vec& x, int o) const override { return self().template apply<double>(p, x, o); }
  VecT<Dual1> map(int p, const VecT<Dual1>& x, int o) const override { return self().template apply<Dual1>(p, x, o); }
  VecT<HyperDual> map(int p, const VecT<HyperDual>& x, int o) const override {
    return self().template apply<HyperDual>(p, x, o);
  }
  VecT<HyperDual3> map(int p, const VecT<HyperDual3>& x, int o) const override {
    return self().template apply<HyperDual3>(p, x, o);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Abstract structure maps. Points of arrows() and objects() are chart points.
class Groupoid {
 public:
  virtual ~Groupoid() = default;
  virtual const ManifoldPtr& arrows() const = 0;
  virtual const ManifoldPtr& objects() const = 0;
  virtual Point source(const Point& a) const = 0;
  virtual Point target(const Point& a) const = 0;
  virtual Point unit(const Point& x) const = 0;
  virtual Point inverse(const Point& a) const = 0;
  // m(a, b), defined when s(a) = t(b)
  virtual Point multiply(const Point& a, const Point& b) const = 0;
  virtual Point sample_arrow(std::mt19937_64& rng) const = 0;
  // random arrow with source x
  virtual Point sample_arrow_from(const Point& x, std::mt19937_64& rng) const = 0;
  // Ds at a, into the chart of s(a)
  virtual Mat source_jacobian(const Point& a) const = 0;
};

using GroupoidPtr = std::shared_ptr<const Groupoid>;

// Only units: arrows = objects = M.
class UnitGroupoid : public Groupoid {
 public:
  explicit UnitGroupoid(ManifoldPtr M) : M_(std::move(M)) {}
  const ManifoldPtr& arrows() const override { return M_; }
  const ManifoldPtr& objects() const override { return M_; }
  Point source(const Point& a) const override { return a; }
  Point target(const Point& a) const override { return a; }
  Point unit(const Point& x) const override { return x; }
  Point inverse(const Point& a) const override { return a; }
  Point multiply(const Point& a, const Point&) const override { return a; }
  Point sample_arrow(std::mt19937_64& rng) const override { return M_->sample_reference(rng); }
  Point sample_arrow_from(const Point& x, std::mt19937_64&) const override { return x; }
  Mat source_jacobian(const Point& a) const override;

 private:
  ManifoldPtr M_;
};

// G x M => M for an action of G on M.
class TransformationGroupoid : public Groupoid {
 public:
  explicit TransformationGroupoid(ActionPtr on_M);
  const ManifoldPtr& arrows() const override { return arrows_any_; }
  const ManifoldPtr& objects() const override { return on_M_->manifold(); }
  Point source(const Point& a) const override;
  Point target(const Point& a) const override;
  Point unit(const Point& x) const override;
  Point inverse(const Point& a) const override;
  Point multiply(const Point& a, const Point& b) const override;
  Point sample_arrow(std::mt19937_64& rng) const override;
  Point sample_arrow_from(const Point& x, std::mt19937_64& rng) const override;
  Mat source_jacobian(const Point& a) const override;

  const LieGroup& group() const { return on_M_->group(); }
  const LieGroupPtr& group_ptr() const { return on_M_->group_ptr(); }
  const ActionPtr& base_action() const { return on_M_; }
  std::shared_ptr<const ProductManifold> product() const { return arrows_; }
  Point arrow(const Vec& g, const Point& x) const;
  Vec element(const Point& a) const;
  // Chart vectors at the unit over x of s -> (exp(s e_i), x): a basis of ker Ds there.
  Mat source_kernel_basis(const Point& x) const;

 private:
  ActionPtr on_M_;
  std::shared_ptr<const ProductManifold> arrows_;
  ManifoldPtr arrows_any_;
};

using TransformationGroupoidPtr = std::shared_ptr<const TransformationGroupoid>;

struct AxiomReport {
  double source_mult = 0;  // s(m(g,h)) vs s(h)
  double target_mult = 0;  // t(m(g,h)) vs t(g)
  double associativity = 0;
  double unit = 0;
  double inverse = 0;
  int samples = 0;
  double max() const;
  bool pass(double tol = 1e-10) const { return max() <= tol; }
};
AxiomReport validate_groupoid(const Groupoid& G, int samples, std::uint64_t seed);

// Ds restricted to the eta1-horizontal space against g_M; also the inversion isometry defect (information only).
struct OneMetricReport {
  double submersion = 0;
  double inversion = 0;
  bool pass(double tol = 1e-8) const { return submersion <= tol; }
};
OneMetricReport validate_one_metric(const Groupoid& G, const MetricField& eta1, const MetricField& gM, int samples,
                                    std::uint64_t seed);

struct GroupoidAction {
  std::string id;
  TransformationGroupoidPtr groupoid;
  ActionPtr on_P;      // the same group acting on P
  ObjectMapPtr alpha;  // P -> M, equivariant
  MetricPtr eta_P;
  MetricPtr eta_1;     // 1-metric on the arrows
  MetricPtr g_M;       // metric the 1-metric submerses onto
  const ManifoldPtr& P() const { return on_P->manifold(); }
  const LieGroup& group() const { return groupoid->group(); }
};

// G => {*} acting on (P, g) through a classical action.
GroupoidAction group_case(ActionPtr action, MetricPtr g);
std::vector<std::string> groupoid_action_ids();
GroupoidAction groupoid_action(const std::string& id);

struct ActionReport {
  double anchor = 0;      // alpha(g.p) vs t(g, alpha(p))
  double transverse = 0;  // normal representation isometry defect
  bool pass() const { return anchor <= 1e-10 && transverse <= 1e-6; }
};
ActionReport validate_action(const GroupoidAction& A, int samples, std::uint64_t seed);

// The unit arrow over alpha(p).
Point unit_over(const GroupoidAction& A, const Point& p);
Mat source_kernel_basis(const GroupoidAction& A, const Point& p);
// X*(p) = -D tbar(X, 0) for X in ker Ds at the unit; throws "x-not-in-kernel".
Vec groupoid_action_field(const GroupoidAction& A, const Vec& X, const Point& p);
// Columns X_i* for the kernel basis.
Mat groupoid_orbit_fields(const GroupoidAction& A, const Point& p);
// Gram of the kernel basis in eta1 at the unit.
Mat kernel_gram(const GroupoidAction& A, const Point& p);
// eta1(Sh x, y) = eta_P(X*, Y*) in kernel-basis coordinates.
Mat groupoid_shape_tensor(const GroupoidAction& A, const Point& p);
TangentSplit groupoid_split(const GroupoidAction& A, const Point& p, const Vec& v);

struct HypothesisReport {
  bool pass = true;
  double max_residual = 0;  // max |D alpha N| over unit normals N
  int samples = 0;
  int failures = 0;
  Point worst;
};
double hypothesis_residual(const GroupoidAction& A, const Point& p);
HypothesisReport hypothesis_check(const GroupoidAction& A, int samples, std::uint64_t seed, double tol = 1e-8);

// eta_eps = (eta_P^{-1} + eps E Gram^{-1} E^T)^{-1}. Throws "hypothesis-violated" or "spd-failure".
MetricPtr groupoid_cheeger_metric(const GroupoidAction& A, double eps);
// Ch(v) = ((I + eps Sh)^{-1} x)* + v_perp, so eta_eps(X, Y) = eta_P(Ch X, Y).
Vec groupoid_cheeger_tensor(const GroupoidAction& A, double eps, const Point& p, const Vec& v);
// Ch^{-1}(v) = ((I + eps Sh) x)* + v_perp
Vec groupoid_cheeger_tensor_inverse(const GroupoidAction& A, double eps, const Point& p, const Vec& v);

// Ambient space (arrows x P) and the point (1_{alpha(p)}, p).
std::shared_ptr<const ProductManifold> ambient_manifold(const GroupoidAction& A);
Point ambient_point(const GroupoidAction& A, const Point& p);
// (1/eps) eta1 (+) eta_P
MetricPtr ambient_metric(const GroupoidAction& A, double eps);

// h(p)(X) = (-eps K Sh x, X) with zero M-block, as an ambient vector.
Vec groupoid_horizontal_lift(const GroupoidAction& A, double eps, const Point& p, const Vec& X);
struct LiftCheck {
  double pushforward = 0;  // |D tbar h - Ch^{-1} X|
  double horizontal = 0;   // max |etahat(h, V_i)| / (|h| |V_i|) against the vertical vectors (K_i, X_i*)
  double tangency = 0;     // |Ds(arrow part) - D alpha(X)|
};
LiftCheck lift_check(const GroupoidAction& A, double eps, const Point& p, const Vec& X);

// Fibered product parametrized by G x P, (g, p) -> ((g, alpha(p)), p), with the induced metric,
// submersing onto (P, eta_eps) by (g, p) -> g.p.
SubmersionPtr fibered_submersion(const GroupoidAction& A, double eps);
Point fibered_point(const GroupoidAction& A, const Point& p);
// The lift as a vector of the parametrization; its image in the ambient space is
// (-eps K Sh x, D alpha X, X).
Vec fibered_lift(const GroupoidAction& A, double eps, const Point& p, const Vec& X);
Vec fibered_to_ambient(const GroupoidAction& A, const Point& p, const Vec& u);

enum class FormMethod { Projection, Embedding };
// II(v, w) of the fibered product in the ambient space, at ambient_point(p). Throws "constraint-violation".
Vec second_fundamental_form(const GroupoidAction& A, double eps, const Point& p, const Vec& v, const Vec& w,
                            FormMethod method = FormMethod::Projection);
// Rows of the constraint Jacobian at ambient_point(p).
Mat constraint_jacobian(const GroupoidAction& A, const Point& p);

enum class GaussSign { Gauss, Flipped };
struct GroupoidRhs {
  double base_term = 0;       // eta_P(R(v,w)w, v)
  double groupoid_term = 0;   // ambient arrow curvature of the lifted plane; eps^3 R1(K Sh x, K Sh y) when D alpha X = 0
  double a_term = 0;          // 3 |A|^2
  double ii_norm = 0;         // |II(hv, hw)|^2
  double ii_pair = 0;         // <II(hv, hv), II(hw, hw)>
  double unnormalized = 0;
  double gram = 0;            // eta_eps Gram of (Ch^{-1} v, Ch^{-1} w)
  double normalized = 0;
};
GroupoidRhs rhs_full_curvature(const GroupoidAction& A, double eps, const Point& p, const Vec& v, const Vec& w,
                               GaussSign sign = GaussSign::Gauss);
// Direct sectional curvature of eta_eps on (Ch^{-1} v, Ch^{-1} w).
double groupoid_lhs_curvature(const GroupoidAction& A, double eps, const Point& p, const Vec& v, const Vec& w);

}  // namespace clab
