#include "clab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "clab/cheeger.hpp"
#include "clab/curvature.hpp"
#include "clab/foliation.hpp"
#include "clab/gh.hpp"
#include "clab/groupoid.hpp"
#include "clab/sampling.hpp"

namespace clab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

Vec randn(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0, 1);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

int scaled(int n, double F, int floor_) { return std::max(floor_, static_cast<int>(std::lround(n * F))); }

std::string param(const std::string& k, double v) { return k + "=" + format_double(v); }

struct Rows {
  CriterionResult& c;
  void add(const std::string& q, const std::string& p, double v, double lo, double hi) {
    c.rows.push_back(VerifyRow{c.id, q, p, v, lo, hi});
  }
};

FiniteMetricSpace random_space(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Mat P(n, 2);
  for (int i = 0; i < n; ++i) P.row(i) << U(rng), U(rng);
  FiniteMetricSpace D;
  D.d = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) D.d(i, j) = (P.row(i) - P.row(j)).norm();
  return D;
}

void curvature_engine(Rows r, const VerifyOptions& o, const Tolerances& t) {
  const int pts = scaled(100, o.budget_scale, 10), planes = scaled(5, o.budget_scale, 2);
  auto s3 = std::make_shared<Sphere>(3);
  MetricPtr g = round_sphere_metric(s3);
  SampleSet s = sample_manifold(*s3, pts, o.seed);
  CurvatureReport cr = curvature_scan(*g, s, planes, o.seed + 1);
  double dev = 0;
  for (const auto& e : cr.entries) dev = std::max(dev, std::abs(e.K - 1.0));
  r.add("max |K - 1| on S^3", "points=" + std::to_string(pts), dev, 0, t.sphere_K);
  double anti = 0, pair = 0, bianchi = 0;
  for (const Point& p : s.points) {
    SymmetryResiduals y = symmetry_residuals(curvature_tensor(*g, p));
    anti = std::max(anti, y.antisymmetry);
    pair = std::max(pair, y.pair_symmetry);
    bianchi = std::max(bianchi, y.bianchi);
  }
  r.add("Riemann antisymmetry", "S^3", anti, 0, t.riemann_symmetry);
  r.add("Riemann pair symmetry", "S^3", pair, 0, t.riemann_symmetry);
  r.add("first Bianchi", "S^3", bianchi, 0, t.riemann_symmetry);
  auto t3 = std::make_shared<FlatTorus>(3);
  CurvatureReport fr = curvature_scan(*flat_metric(t3), sample_manifold(*t3, pts, o.seed + 2), planes, o.seed + 3);
  r.add("max |K| on flat T^3", "points=" + std::to_string(pts), fr.max_abs(), 0, t.flat_K);
}

void oneill(Rows r, const VerifyOptions& o, const Tolerances& t) {
  auto s3 = std::make_shared<Sphere>(3);
  SubmersionPtr h = hopf_submersion(s3, std::make_shared<Sphere>(2));
  std::mt19937_64 rng(o.seed + 10);
  double worst = 0, base = 0;
  for (const Point& p : sample_manifold(*s3, scaled(20, o.budget_scale, 5), o.seed + 11).points) {
    ONeillTerms q = oneill_residual(*h, p, randn(rng, 2), randn(rng, 2));
    worst = std::max(worst, std::abs(q.residual));
    base = std::max(base, std::abs(q.k_base - 4.0));
  }
  r.add("max |K_base - (K_total + 3|A|^2)|", "hopf", worst, 0, t.oneill);
  r.add("max |K_base - 4|", "hopf", base, 0, t.oneill);
}

void cheeger(Rows r, const VerifyOptions& o, const Tolerances& t) {
  auto s3 = std::make_shared<Sphere>(3);
  auto t2 = std::make_shared<FlatTorus>(2);
  struct Case {
    ActionPtr a;
    MetricPtr g;
  };
  std::vector<Case> cases = {{hopf_action(s3), round_sphere_metric(s3)}, {torus_translation_action(t2), flat_metric(t2)}};
  const int draws = scaled(50, o.budget_scale, 5);
  std::mt19937_64 rng(o.seed + 20);
  for (const Case& cs : cases) {
    const int n = cs.g->dim();
    SampleSet s = sample_manifold(*cs.g->manifold(), draws, o.seed + 21);
    for (double tt : {0.1, 1.0, 10.0}) {
      CheegerContext c(cs.a, cs.g, tt);
      double rel = 0, least = kInf;
      for (const Point& p : s.points) {
        Vec v = randn(rng, n), w = randn(rng, n);
        RhsCurvature rhs = rhs_curvature(c, p, v, w);
        double lhs = lhs_curvature(c, p, v, w);
        rel = std::max(rel, std::abs(lhs - rhs.normalized) / std::max(1.0, std::abs(lhs)));
        least = std::min(least, rhs.unnormalized - rhs.base_term);
      }
      std::string key = cs.a->registry_id() + " " + param("t", tt);
      r.add("max relative |direct - formula|", key, rel, 0, t.cheeger_rel);
      r.add("min (RHS - K(g) term)", key, least, -t.nondecrease, kInf);
    }
  }
  // Berger sphere at t = 1: extremes 1/2 and 5/2
  CheegerContext c(hopf_action(s3), round_sphere_metric(s3), 1.0);
  MetricPtr gt = deformed_metric(c);
  double lo = kInf, hi = -kInf;
  const int planes = scaled(40, o.budget_scale, 10);
  for (const Point& p : sample_manifold(*s3, scaled(30, o.budget_scale, 6), o.seed + 22).points) {
    CurvatureData cd = curvature_tensor(*gt, p);
    for (int k = 0; k < planes; ++k) {
      double K = sectional_curvature(cd, randn(rng, 3), randn(rng, 3));
      lo = std::min(lo, K);
      hi = std::max(hi, K);
    }
  }
  r.add("Berger min K", "t=1", lo, 0.5 * (1 - t.berger_rel), 0.5 * (1 + t.berger_rel));
  r.add("Berger max K", "t=1", hi, 2.5 * (1 - t.berger_rel), 2.5 * (1 + t.berger_rel));
}

void collapse(Rows r, const VerifyOptions& o, const Tolerances& t) {
  FoliatedModel m = foliated_model("hopf-s3");
  const double F = o.budget_scale;
  QuotientSample q = quotient_sample(m, scaled(200, F, 40), o.seed + 30, 16);
  LeafPoints lp = leaf_points(m, q.leaves, 6, o.seed + 31);
  GhSearchOptions go;
  go.hint = lp.leaf;
  go.iterations = scaled(3000, F, 300);
  GhHook gh = [&](const MetricField& g, double) {
    FiniteMetricSpace X = leaf_graph_distances(m, g, lp, 12);
    double best = kInf;
    for (double eps : {0.03, 0.05, 0.08}) best = std::min(best, gh_upper_bound(X, q.D, eps, go, o.seed + 32).bound);
    return best;
  };
  CollapseBudget b;
  b.curvature_points = scaled(40, F, 8);
  b.planes_per_point = scaled(5, F, 2);
  b.distance_points = scaled(600, F, 120);
  CollapseReport rep = collapse_scan(m, CollapseMode::Regular, {1.0, 0.5, 0.1, 0.01, 0.001}, b, o.seed + 33, gh);
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const CollapseRow& row = rep.rows[i];
    std::string key = param("delta", row.delta);
    r.add("max |Sec|", key, row.max_abs_K, 0, t.collapse_K);
    r.add("diameter", key, row.diameter, 0.9 * kPi / 2, 1.1 * kPi);
    r.add("gh bound", key, row.gh_bound, 0, kInf);
    if (i > 0) r.add("gh bound increase", key, row.gh_bound - rep.rows[i - 1].gh_bound, -kInf, t.gh_noise);
    if (row.delta == 0.01) r.add("gh bound at 0.01", key, row.gh_bound, 0, t.gh_limit);
    if (row.delta == 0.001)
      r.add("diameter vs pi/2", key, row.diameter, (1 - t.diameter_rel) * kPi / 2, (1 + t.diameter_rel) * kPi / 2);
  }
}

void singular(Rows r, const VerifyOptions& o, const Tolerances& t) {
  FoliatedModel m = foliated_model("t2-s3");
  CollapseBudget b;
  b.curvature_points = scaled(b.curvature_points, o.budget_scale, 8);
  b.planes_per_point = scaled(b.planes_per_point, o.budget_scale, 2);
  b.diameter = false;
  CollapseReport rep =
      collapse_scan(m, CollapseMode::Singular, {std::exp(-1.0), 0.1, 0.03, 0.01, 0.003, 0.001}, b, o.seed + 40);
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const CollapseRow& row = rep.rows[i];
    std::string key = param("delta", row.delta);
    r.add("volume", key, row.volume, 0, kInf);
    r.add("max |Sec|", key, row.max_abs_K, 0, kInf);
    if (i > 0) r.add("volume ratio to previous", key, row.volume / rep.rows[i - 1].volume, 0, 1 - 1e-12);
  }
  r.add("fitted exponent", "l", rep.fit ? rep.fit->ell : std::nan(""), t.ell_lo, t.ell_hi);
  if (rep.fit) r.add("fitted log exponent", "m", rep.fit->m, -kInf, kInf);
  r.add("max |Sec| growth", "last/first", rep.rows.back().max_abs_K / rep.rows.front().max_abs_K, 0,
        t.k_growth * (1 - 1e-12));
}

void gh_module(Rows r, const VerifyOptions& o, const Tolerances& t) {
  std::mt19937_64 rng(o.seed + 50);
  double slack = kInf, witness_gap = 0;
  int invalid = 0;
  for (int k = 0; k < 50; ++k) {
    FiniteMetricSpace X = random_space(rng, 1 + k % 5), Y = random_space(rng, 1 + (k / 5) % 5);
    double exact = gh_brute_force(X, Y);
    GhSearchOptions go;
    go.iterations = 400;
    GhResult res = gh_upper_bound(X, Y, 0.05, go, o.seed + k);
    slack = std::min(slack, res.bound - exact);
    WitnessCheck c = verify_witness(X, Y, res.witness);
    invalid += !c.valid;
    witness_gap = std::max(witness_gap, std::abs(res.bound - (2 * res.witness.eps + res.witness.delta)));
  }
  r.add("min (upper bound - brute force)", "pairs=50", slack, -t.gh_sound, kInf);
  r.add("invalid witnesses", "pairs=50", invalid, 0, 0);
  r.add("max |bound - (2 eps + delta)|", "pairs=50", witness_gap, 0, 0);
  FiniteMetricSpace pt;
  pt.d = Mat::Zero(1, 1);
  double point_gap = 0;
  for (int k = 0; k < 10; ++k) {
    FiniteMetricSpace X = random_space(rng, 2 + k % 5);
    point_gap = std::max(point_gap, std::abs(gh_brute_force(pt, X) - 0.5 * X.d.maxCoeff()));
  }
  r.add("max |d_GH(point, X) - diam/2|", "spaces=10", point_gap, 0, 0);
}

void groupoid(Rows r, const VerifyOptions& o, const Tolerances& t) {
  std::mt19937_64 rng(o.seed + 60);
  const int samples = scaled(100, o.budget_scale, 10), draws = scaled(5, o.budget_scale, 2);
  for (const std::string& id : groupoid_action_ids()) {
    if (id.rfind("group:", 0) != 0) continue;
    GroupoidAction A = groupoid_action(id);
    const int n = A.P()->dim(), N = A.group().dim() + n;
    SampleSet s = sample_manifold(*A.P(), samples, o.seed + 61);
    for (double eps : {0.1, 1.0, 10.0}) {
      std::string key = id + " " + param("eps", eps);
      MetricPtr me = groupoid_cheeger_metric(A, eps);
      MetricPtr gt = deformed_metric(CheegerContext(A.on_P, A.eta_P, eps));
      double dev = 0;
      for (const Point& p : s.points) dev = std::max(dev, ((*me)(p) - (*gt)(p)).norm());
      r.add("max |eta_eps - g_t|", key, dev, 0, t.groupoid_metric);
      double ii = 0, rel = 0;
      for (int k = 0; k < draws; ++k) {
        const Point& p = s.points[k];
        ii = std::max(ii, second_fundamental_form(A, eps, p, randn(rng, N), randn(rng, N)).norm());
        Vec v = randn(rng, n), w = randn(rng, n);
        double lhs = groupoid_lhs_curvature(A, eps, p, v, w);
        rel = std::max(rel, std::abs(rhs_full_curvature(A, eps, p, v, w).normalized - lhs) / std::max(1.0, std::abs(lhs)));
      }
      r.add("max |II|", key, ii, 0, t.groupoid_ii);
      r.add("max relative |formula - direct|", key, rel, 0, t.groupoid_rhs);
    }
  }
}

const char* kTitles[] = {"",
                         "curvature engine",
                         "O'Neill identity",
                         "Cheeger formula cross-validation",
                         "regular collapse with bounded curvature",
                         "singular collapse volume decay",
                         "Gromov-Hausdorff module",
                         "groupoid reduction",
                         "determinism"};

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Tolerances scaled_tolerances(double F) {
  if (!(F > 0.0) || !std::isfinite(F)) throw std::invalid_argument("budget scale must be > 0");
  Tolerances t;
  if (F >= 1.0) return t;
  const double f = std::min(2.0, 1.0 / std::sqrt(F));
  t.berger_rel *= f;
  t.diameter_rel *= f;
  t.gh_limit *= f;
  t.gh_noise *= f;
  return t;
}

std::string tolerance_table(const Tolerances& t, double F) {
  std::ostringstream os;
  os << "# tolerances (budget scale " << F << ")\n";
  auto line = [&](const char* name, double v, const char* note) {
    os << "#   " << name << " = " << format_double(v) << "  " << note << "\n";
  };
  line("sphere_K", t.sphere_K, "exact");
  line("flat_K", t.flat_K, "exact");
  line("riemann_symmetry", t.riemann_symmetry, "exact");
  line("oneill", t.oneill, "exact");
  line("cheeger_rel", t.cheeger_rel, "exact");
  line("nondecrease", t.nondecrease, "exact");
  line("berger_rel", t.berger_rel, "x min(2, 1/sqrt(F))");
  line("collapse_K", t.collapse_K, "exact");
  line("diameter_rel", t.diameter_rel, "x min(2, 1/sqrt(F))");
  line("gh_noise", t.gh_noise, "x min(2, 1/sqrt(F))");
  line("gh_limit", t.gh_limit, "x min(2, 1/sqrt(F))");
  line("ell window lo", t.ell_lo, "exact");
  line("ell window hi", t.ell_hi, "exact");
  line("k_growth", t.k_growth, "exact");
  line("gh_sound", t.gh_sound, "exact");
  line("groupoid_metric", t.groupoid_metric, "exact");
  line("groupoid_ii", t.groupoid_ii, "exact");
  line("groupoid_rhs", t.groupoid_rhs, "exact");
  os << "# budget scaling: sample counts x F with per-quantity floors; F >= 1 keeps the defaults above\n";
  return os.str();
}

bool CriterionResult::pass() const {
  if (rows.empty()) return false;
  for (const auto& r : rows)
    if (!r.pass()) return false;
  return time_limit <= 0 || seconds <= time_limit;
}

bool VerifyReport::pass() const {
  for (const auto& c : criteria)
    if (!c.pass()) return false;
  return !criteria.empty();
}

CriterionResult verify_criterion(int id, const VerifyOptions& o, const Tolerances& t) {
  if (id < 1 || id > 7) throw std::invalid_argument("verify_criterion: id must be in 1..7");
  CriterionResult c;
  c.id = id;
  c.title = kTitles[id];
  auto start = std::chrono::steady_clock::now();
  Rows r{c};
  switch (id) {
    case 1: curvature_engine(r, o, t); c.time_limit = t.time_curvature; break;
    case 2: oneill(r, o, t); break;
    case 3: cheeger(r, o, t); c.time_limit = t.time_cheeger; break;
    case 4: collapse(r, o, t); break;
    case 5: singular(r, o, t); c.time_limit = t.time_singular; break;
    case 6: gh_module(r, o, t); break;
    case 7: groupoid(r, o, t); break;
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

VerifyReport verify_all(const VerifyOptions& o) {
  VerifyReport rep;
  rep.options = o;
  rep.tol = scaled_tolerances(o.budget_scale);
  for (int id = 1; id <= 7; ++id) rep.criteria.push_back(verify_criterion(id, o, rep.tol));
  if (o.determinism) {
    CriterionResult d;
    d.id = 8;
    d.title = kTitles[8];
    auto start = std::chrono::steady_clock::now();
    std::vector<CriterionResult> again;
    for (int id = 1; id <= 7; ++id) again.push_back(verify_criterion(id, o, rep.tol));
    const bool same = verify_csv(again) == verify_csv(rep.criteria);
    d.rows.push_back(VerifyRow{8, "CSV bytes identical across two runs", "seed=" + std::to_string(o.seed),
                               same ? 1.0 : 0.0, 1, 1});
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.criteria.push_back(d);
  }
  return rep;
}

std::string verify_csv(const std::vector<CriterionResult>& criteria) {
  std::ostringstream os;
  os << "criterion,quantity,parameter,value,lo,hi,pass\n";
  for (const auto& c : criteria)
    for (const auto& r : c.rows)
      os << r.criterion << ",\"" << r.quantity << "\",\"" << r.parameter << "\"," << format_double(r.value) << ","
         << format_double(r.lo) << "," << format_double(r.hi) << "," << (r.pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string verdict_line(const CriterionResult& c) {
  std::ostringstream os;
  os << (c.pass() ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title;
  std::snprintf(nullptr, 0, "%s", "");
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.1f s", c.seconds);
  os << buf;
  if (c.time_limit > 0) {
    std::snprintf(buf, sizeof buf, ", limit %.0f s", c.time_limit);
    os << buf;
  }
  os << ")";
  for (const auto& r : c.rows)
    if (!r.pass()) os << "\n    failed: " << r.quantity << " [" << r.parameter << "] = " << format_double(r.value);
  return os.str();
}

}  // namespace clab
