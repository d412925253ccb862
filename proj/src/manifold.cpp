#include "clab/manifold.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace clab {

namespace {
constexpr double kPi = std::numbers::pi;

PatchBox make_box(int n, double lo, double hi, bool periodic) {
  PatchBox b;
  b.lower = Vec::Constant(n, lo);
  b.upper = Vec::Constant(n, hi);
  b.periodic.assign(n, periodic);
  return b;
}
}  // namespace

bool Manifold::contains(int patch, const Vec& x) const {
  if (patch < 0 || patch >= num_patches()) return false;
  const PatchBox& b = box(patch);
  if (x.size() != b.lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i))) return false;
    if (b.periodic[i]) continue;
    if (!(x(i) > b.lower(i) && x(i) < b.upper(i))) return false;
  }
  return true;
}

double Manifold::boundary_distance(int patch, const Vec& x) const {
  const PatchBox& b = box(patch);
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (b.periodic[i]) continue;
    d = std::min({d, x(i) - b.lower(i), b.upper(i) - x(i)});
  }
  return d;
}

Vec Manifold::wrap(int patch, Vec x) const {
  const PatchBox& b = box(patch);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!b.periodic[i]) continue;
    double L = b.upper(i) - b.lower(i);
    double y = std::fmod(x(i) - b.lower(i), L);
    if (y < 0) y += L;
    if (y >= L) y -= L;
    x(i) = b.lower(i) + y;
  }
  return x;
}

Point Manifold::canonical(const Point& p) const {
  Point best{p.patch, wrap(p.patch, p.coords)};
  double margin = contains(p.patch, best.coords) ? boundary_distance(p.patch, best.coords)
                                                 : -std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_patches(); ++k) {
    if (k == p.patch) continue;
    auto y = transition(p, k);
    if (!y) continue;
    Vec w = wrap(k, *y);
    if (!contains(k, w)) continue;
    double m = boundary_distance(k, w);
    if (m > margin) {
      margin = m;
      best = Point{k, w};
    }
  }
  if (!contains(best.patch, best.coords)) throw std::domain_error("point-outside-patch");
  return best;
}

std::optional<Vec> Manifold::difference(const Point& p, const Point& q) const {
  auto y = q.patch == p.patch ? std::optional<Vec>(q.coords) : transition(q, p.patch);
  if (!y) return std::nullopt;
  Vec d = *y - p.coords;
  const PatchBox& b = box(p.patch);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!b.periodic[i]) continue;
    double L = b.upper(i) - b.lower(i);
    d(i) -= L * std::round(d(i) / L);
  }
  return d;
}

void Manifold::check(const Point& p) const {
  if (!contains(p.patch, p.coords)) throw std::domain_error("point-outside-patch");
}

// ---- FlatTorus

FlatTorus::FlatTorus(int k, double period) : k_(k), period_(period), box_(make_box(k, 0.0, period, true)) {}

std::string FlatTorus::id() const { return "t" + std::to_string(k_) + "-flat"; }

std::optional<Vec> FlatTorus::transition(const Point& p, int) const { return p.coords; }

Point FlatTorus::sample_reference(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(0.0, period_);
  Vec x(k_);
  for (int i = 0; i < k_; ++i) x(i) = U(rng);
  return Point{0, x};
}

double FlatTorus::reference_density(const Point&) const { return 1.0 / std::pow(period_, k_); }

// ---- Sphere

Sphere::Sphere(int n, double w) : n_(n), box_(make_box(n, -w, w, false)) {}

std::string Sphere::id() const { return "s" + std::to_string(n_); }

std::optional<Vec> Sphere::transition(const Point& p, int target) const {
  if (target == p.patch) return p.coords;
  double r2 = p.coords.squaredNorm();
  if (r2 == 0.0) return std::nullopt;  // the other pole
  return Vec(p.coords / r2);
}

Point Sphere::from_ambient(const Vec& z0) const {
  Vec z = z0 / z0.norm();
  int patch = z(n_) <= 0.0 ? 0 : 1;
  return Point{patch, from_embedding<double>(patch, z)};
}

double Sphere::area() const {
  // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  return 2.0 * std::pow(kPi, 0.5 * (n_ + 1)) / std::tgamma(0.5 * (n_ + 1));
}

Point Sphere::sample_reference(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec z(n_ + 1);
  for (;;) {
    for (int i = 0; i <= n_; ++i) z(i) = U(rng);
    double r2 = z.squaredNorm();
    if (r2 > 1e-4 && r2 <= 1.0) break;
  }
  return from_ambient(z);
}

double Sphere::reference_density(const Point& p) const {
  double r2 = p.coords.squaredNorm();
  return std::pow(2.0 / (1.0 + r2), n_) / area();
}

// ---- CliffordS3

CliffordS3::CliffordS3() {
  box_.lower = Vec(3);
  box_.upper = Vec(3);
  box_.lower << 0.0, 0.0, 0.0;
  box_.upper << kPi / 2, 2 * kPi, 2 * kPi;
  box_.periodic = {false, true, true};
}

std::optional<Vec> CliffordS3::transition(const Point& p, int) const { return p.coords; }

Point CliffordS3::sample_reference(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double u;
  do u = U(rng); while (u <= 0.0 || u >= 1.0);
  Vec x(3);
  x << std::asin(std::sqrt(u)), 2 * kPi * U(rng), 2 * kPi * U(rng);
  return Point{0, x};
}

double CliffordS3::reference_density(const Point& p) const {
  // dvol = cos(eta) sin(eta) d eta d xi1 d xi2, total 2 pi^2
  double e = p.coords(0);
  return std::cos(e) * std::sin(e) / (2 * kPi * kPi);
}

// ---- DiskPatch

DiskPatch::DiskPatch(double w) : box_(make_box(2, -w, w, false)) {}

std::optional<Vec> DiskPatch::transition(const Point& p, int) const { return p.coords; }

Point DiskPatch::sample_reference(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(box_.lower(0), box_.upper(0));
  Vec x(2);
  x << U(rng), U(rng);
  return Point{0, x};
}

double DiskPatch::reference_density(const Point&) const {
  double w = box_.upper(0) - box_.lower(0);
  return 1.0 / (w * w);
}

// ---- PointManifold

PointManifold::PointManifold() { box_.periodic.clear(); }

// ---- ProductManifold

ProductManifold::ProductManifold(ManifoldPtr a, ManifoldPtr b) : a_(std::move(a)), b_(std::move(b)) {
  for (int i = 0; i < a_->num_patches(); ++i)
    for (int j = 0; j < b_->num_patches(); ++j) {
      const PatchBox& ba = a_->box(i);
      const PatchBox& bb = b_->box(j);
      PatchBox p;
      p.lower = Vec(dim());
      p.upper = Vec(dim());
      p.lower << ba.lower, bb.lower;
      p.upper << ba.upper, bb.upper;
      p.periodic = ba.periodic;
      p.periodic.insert(p.periodic.end(), bb.periodic.begin(), bb.periodic.end());
      boxes_.push_back(p);
    }
}

std::string ProductManifold::id() const { return a_->id() + "x" + b_->id(); }

Point ProductManifold::join(const Point& pa, const Point& pb) const {
  Vec x(dim());
  x << pa.coords, pb.coords;
  return Point{pa.patch * b_->num_patches() + pb.patch, x};
}

std::pair<Point, Point> ProductManifold::split(const Point& p) const {
  int nb = b_->num_patches();
  return {Point{p.patch / nb, p.coords.head(a_->dim())}, Point{p.patch % nb, p.coords.tail(b_->dim())}};
}

std::optional<Vec> ProductManifold::transition(const Point& p, int target) const {
  auto [pa, pb] = split(p);
  int nb = b_->num_patches();
  auto ya = a_->transition(pa, target / nb);
  auto yb = b_->transition(pb, target % nb);
  if (!ya || !yb) return std::nullopt;
  Vec x(dim());
  x << *ya, *yb;
  return x;
}

Point ProductManifold::sample_reference(std::mt19937_64& rng) const {
  Point pa = a_->sample_reference(rng);
  Point pb = b_->sample_reference(rng);
  return join(pa, pb);
}

double ProductManifold::reference_density(const Point& p) const {
  auto [pa, pb] = split(p);
  return a_->reference_density(pa) * b_->reference_density(pb);
}

}  // namespace clab
