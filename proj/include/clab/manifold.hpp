#pragma once
// Finite atlases of open coordinate boxes.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clab/linalg.hpp"

namespace clab {

struct Point {
  int patch = 0;
  Vec coords;
};

struct TangentVector {
  Point base;
  Vec components;
};

struct PatchBox {
  Vec lower;
  Vec upper;
  std::vector<bool> periodic;
};

class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual int num_patches() const = 0;
  virtual const PatchBox& box(int patch) const = 0;

  // Coordinates of p in another patch, or nullopt outside that patch's domain.
  virtual std::optional<Vec> transition(const Point& p, int target) const = 0;

  // One draw from the reference probability measure.
  virtual Point sample_reference(std::mt19937_64& rng) const = 0;
  // Density of the reference probability measure w.r.t. chart Lebesgue measure.
  virtual double reference_density(const Point& p) const = 0;
  virtual std::string reference_scheme() const { return "uniform-box"; }

  virtual std::optional<Vec> embed(const Point&) const { return std::nullopt; }

  bool contains(int patch, const Vec& x) const;
  double boundary_distance(int patch, const Vec& x) const;
  Vec wrap(int patch, Vec x) const;
  // Re-express p in the patch with the largest boundary margin.
  Point canonical(const Point& p) const;
  // Chart displacement from p to q, expressed in p's patch (periodic coords use the nearest image).
  std::optional<Vec> difference(const Point& p, const Point& q) const;
  void check(const Point& p) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

// Flat torus R^k / (L Z)^k, one periodic patch.
class FlatTorus : public Manifold {
 public:
  explicit FlatTorus(int k, double period = 1.0);
  std::string id() const override;
  int dim() const override { return k_; }
  int num_patches() const override { return 1; }
  const PatchBox& box(int) const override { return box_; }
  std::optional<Vec> transition(const Point& p, int target) const override;
  Point sample_reference(std::mt19937_64& rng) const override;
  double reference_density(const Point&) const override;
  double period() const { return period_; }

 private:
  int k_;
  double period_;
  PatchBox box_;
};

// Unit sphere S^n in R^{n+1}, stereographic patches.
// Patch 0 projects from +e_{n+1} (its origin is -e_{n+1}); patch 1 projects from -e_{n+1}.
class Sphere : public Manifold {
 public:
  explicit Sphere(int n, double box_half_width = 2.0);
  std::string id() const override;
  int dim() const override { return n_; }
  int num_patches() const override { return 2; }
  const PatchBox& box(int) const override { return box_; }
  std::optional<Vec> transition(const Point& p, int target) const override;
  Point sample_reference(std::mt19937_64& rng) const override;
  double reference_density(const Point& p) const override;
  std::string reference_scheme() const override { return "embedded-rejection"; }
  std::optional<Vec> embed(const Point& p) const override { return to_embedding<double>(p.patch, p.coords); }

  Point from_ambient(const Vec& z) const;  // z is normalized first
  double area() const;                     // volume of the unit sphere

  template <class T>
  static VecT<T> to_embedding(int patch, const VecT<T>& x) {
    const Eigen::Index n = x.size();
    T r2(0.0);
    for (Eigen::Index i = 0; i < n; ++i) r2 += x(i) * x(i);
    T den = 1.0 + r2;
    VecT<T> z(n + 1);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = 2.0 * x(i) / den;
    T last = (1.0 - r2) / den;
    z(n) = patch == 0 ? T(-last) : last;
    return z;
  }
  template <class T>
  static VecT<T> from_embedding(int patch, const VecT<T>& z) {
    const Eigen::Index n = z.size() - 1;
    T den = patch == 0 ? T(1.0 - z(n)) : T(1.0 + z(n));
    VecT<T> x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = z(i) / den;
    return x;
  }

 private:
  int n_;
  PatchBox box_;
};

// S^3 in Clifford coordinates (eta, xi1, xi2):
// z1 = cos(eta) e^{i xi1}, z2 = sin(eta) e^{i xi2}; eta in (0, pi/2), xi periodic.
class CliffordS3 : public Manifold {
 public:
  CliffordS3();
  std::string id() const override { return "s3-clifford"; }
  int dim() const override { return 3; }
  int num_patches() const override { return 1; }
  const PatchBox& box(int) const override { return box_; }
  std::optional<Vec> transition(const Point& p, int target) const override;
  Point sample_reference(std::mt19937_64& rng) const override;
  double reference_density(const Point& p) const override;
  std::optional<Vec> embed(const Point& p) const override { return to_embedding<double>(p.coords); }

  template <class T>
  static VecT<T> to_embedding(const VecT<T>& x) {
    VecT<T> z(4);
    T c = cos(x(0)), s = sin(x(0));
    z(0) = c * cos(x(1));
    z(1) = c * sin(x(1));
    z(2) = s * cos(x(2));
    z(3) = s * sin(x(2));
    return z;
  }

 private:
  PatchBox box_;
};

// Open box of the Poincare disk (one patch, not a full atlas).
class DiskPatch : public Manifold {
 public:
  explicit DiskPatch(double half_width = 0.7);
  std::string id() const override { return "disk-patch"; }
  int dim() const override { return 2; }
  int num_patches() const override { return 1; }
  const PatchBox& box(int) const override { return box_; }
  std::optional<Vec> transition(const Point& p, int target) const override;
  Point sample_reference(std::mt19937_64& rng) const override;
  double reference_density(const Point&) const override;

 private:
  PatchBox box_;
};

// Zero-dimensional manifold.
class PointManifold : public Manifold {
 public:
  PointManifold();
  std::string id() const override { return "point"; }
  int dim() const override { return 0; }
  int num_patches() const override { return 1; }
  const PatchBox& box(int) const override { return box_; }
  std::optional<Vec> transition(const Point& p, int) const override { return p.coords; }
  Point sample_reference(std::mt19937_64&) const override { return Point{0, Vec()}; }
  double reference_density(const Point&) const override { return 1.0; }

 private:
  PatchBox box_;
};

// Cartesian product; patch index = ia * nb + ib, coordinates concatenated.
class ProductManifold : public Manifold {
 public:
  ProductManifold(ManifoldPtr a, ManifoldPtr b);
  std::string id() const override;
  int dim() const override { return a_->dim() + b_->dim(); }
  int num_patches() const override { return a_->num_patches() * b_->num_patches(); }
  const PatchBox& box(int patch) const override { return boxes_.at(patch); }
  std::optional<Vec> transition(const Point& p, int target) const override;
  Point sample_reference(std::mt19937_64& rng) const override;
  double reference_density(const Point& p) const override;

  const ManifoldPtr& first() const { return a_; }
  const ManifoldPtr& second() const { return b_; }
  Point join(const Point& pa, const Point& pb) const;
  std::pair<Point, Point> split(const Point& p) const;

 private:
  ManifoldPtr a_, b_;
  std::vector<PatchBox> boxes_;
};

}  // namespace clab
