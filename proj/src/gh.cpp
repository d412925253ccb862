#include "clab/gh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <map>
#include <stdexcept>

namespace clab {

NetWitness epsilon_net(const FiniteMetricSpace& D, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("epsilon_net: eps must be positive");
  const int n = D.size();
  NetWitness w;
  w.eps = eps;
  if (n == 0) return w;
  std::vector<double> mind(n, std::numeric_limits<double>::infinity());
  int next = 0;
  while (true) {
    w.indices.push_back(next);
    int far = -1;
    double fd = -1;
    for (int i = 0; i < n; ++i) {
      mind[i] = std::min(mind[i], D(i, next));
      if (mind[i] > fd) {
        fd = mind[i];
        far = i;
      }
    }
    if (fd <= eps) break;
    next = far;
  }
  return w;
}

double cover_radius(const FiniteMetricSpace& D, const std::vector<int>& subset) {
  double r = 0;
  for (int i = 0; i < D.size(); ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (int s : subset) m = std::min(m, D(i, s));
    r = std::max(r, m);
  }
  return r;
}

double pair_distortion(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY, const std::vector<int>& xs,
                       const std::vector<int>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pair_distortion: length mismatch");
  double d = 0;
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = i + 1; j < xs.size(); ++j) d = std::max(d, std::abs(DX(xs[i], xs[j]) - DY(ys[i], ys[j])));
  return d;
}

WitnessCheck verify_witness(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY, const ApproximationWitness& w) {
  WitnessCheck c;
  c.cover_x = cover_radius(DX, w.xs);
  c.cover_y = cover_radius(DY, w.ys);
  c.distortion = pair_distortion(DX, DY, w.xs, w.ys);
  c.valid = c.cover_x <= w.eps && c.cover_y <= w.eps && c.distortion == w.delta;
  return c;
}

namespace {

// Paired lists with incremental distortion bookkeeping and net-coverage counts.
class PairState {
 public:
  PairState(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, double eps)
      : X_(X), Y_(Y), eps_(eps), covx_(X.size(), 0), covy_(Y.size(), 0) {}

  int size() const { return static_cast<int>(xs.size()); }

  void push(int x, int y) {
    xs.push_back(x);
    ys.push_back(y);
    const int L = size();
    Mat nd = Mat::Zero(L, L);
    nd.topLeftCorner(L - 1, L - 1) = dis_;
    dis_ = nd;
    rowmax_.push_back(0.0);
    cover(X_, covx_, x, +1);
    cover(Y_, covy_, y, +1);
    update_row(L - 1);
  }

  void set_pair(int i, int x, int y) {
    if (x != xs[i]) {
      cover(X_, covx_, xs[i], -1);
      cover(X_, covx_, x, +1);
      xs[i] = x;
    }
    if (y != ys[i]) {
      cover(Y_, covy_, ys[i], -1);
      cover(Y_, covy_, y, +1);
      ys[i] = y;
    }
    update_row(i);
  }

  bool covered() const {
    for (int c : covx_)
      if (c <= 0) return false;
    for (int c : covy_)
      if (c <= 0) return false;
    return true;
  }

  double max_distortion() const { return rowmax_.empty() ? 0.0 : *std::max_element(rowmax_.begin(), rowmax_.end()); }
  double energy(double w) const {
    const double L = std::max(1, size());
    return max_distortion() + w * std::sqrt(std::max(0.0, sumsq_) / (L * L));
  }

  std::vector<int> xs, ys;

 private:
  const FiniteMetricSpace& X_;
  const FiniteMetricSpace& Y_;
  double eps_;
  std::vector<int> covx_, covy_;
  Mat dis_;
  std::vector<double> rowmax_;
  double sumsq_ = 0;

  void cover(const FiniteMetricSpace& D, std::vector<int>& cnt, int p, int s) {
    for (int z = 0; z < D.size(); ++z)
      if (D(z, p) <= eps_) cnt[z] += s;
  }

  void update_row(int i) {
    const int L = size();
    double rm = 0;
    for (int j = 0; j < L; ++j) {
      if (j == i) continue;
      double nv = std::abs(X_(xs[i], xs[j]) - Y_(ys[i], ys[j]));
      double old = dis_(i, j);
      sumsq_ += 2 * (nv * nv - old * old);
      dis_(i, j) = dis_(j, i) = nv;
      rm = std::max(rm, nv);
      if (nv >= rowmax_[j]) {
        rowmax_[j] = nv;
      } else if (old == rowmax_[j]) {
        double r = 0;
        for (int k = 0; k < L; ++k)
          if (k != j) r = std::max(r, dis_(j, k));
        rowmax_[j] = r;
      }
    }
    rowmax_[i] = rm;
  }
};

// cost of adding (x, y) against the pairs in s: (max, sum) lexicographic
std::pair<double, double> add_cost(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, const PairState& s, int x,
                                   int y) {
  double mx = 0, sm = 0;
  for (int k = 0; k < s.size(); ++k) {
    double d = std::abs(X(x, s.xs[k]) - Y(y, s.ys[k]));
    mx = std::max(mx, d);
    sm += d;
  }
  return {mx, sm};
}

std::vector<int> nearest_lists(const FiniteMetricSpace& D, int k) {
  const int n = D.size();
  k = std::min(k, std::max(0, n - 1));
  std::vector<int> out(static_cast<size_t>(n) * k);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + std::min(n, k + 1), idx.end(), [&](int a, int b) {
      return D(i, a) < D(i, b) || (D(i, a) == D(i, b) && a < b);
    });
    int c = 0;
    for (int j = 0; j < n && c < k; ++j)
      if (idx[j] != i) out[static_cast<size_t>(i) * k + c++] = idx[j];
  }
  return out;
}

PairState initial_pairing(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, double eps, const GhSearchOptions& opt) {
  NetWitness nx = epsilon_net(X, eps), ny = epsilon_net(Y, eps);
  PairState s(X, Y, eps);
  std::vector<int> cand = ny.indices;
  {
    std::vector<char> in(Y.size(), 0);
    for (int y : ny.indices) in[y] = 1;
    for (int y = 0; y < Y.size(); ++y)
      if (!in[y]) cand.push_back(y);
  }
  auto best_y = [&](int x) {
    int by = cand[0];
    std::pair<double, double> bc{std::numeric_limits<double>::infinity(), 0};
    for (int y : cand) {
      auto c = add_cost(X, Y, s, x, y);
      if (c < bc) {
        bc = c;
        by = y;
      }
    }
    return by;
  };
  auto best_x = [&](int y) {
    int bx = 0;
    std::pair<double, double> bc{std::numeric_limits<double>::infinity(), 0};
    for (int x = 0; x < X.size(); ++x) {
      auto c = add_cost(X, Y, s, x, y);
      if (c < bc) {
        bc = c;
        bx = x;
      }
    }
    return bx;
  };
  for (int x : nx.indices) {
    int y = !opt.hint.empty() ? opt.hint.at(x) : best_y(x);
    s.push(x, y);
  }
  // extend until the y-list is an eps-net of Y
  while (true) {
    int worst = -1;
    double wd = eps;
    for (int z = 0; z < Y.size(); ++z) {
      double m = std::numeric_limits<double>::infinity();
      for (int y : s.ys) m = std::min(m, Y(z, y));
      if (m > wd) {
        wd = m;
        worst = z;
      }
    }
    if (worst < 0) break;
    s.push(best_x(worst), worst);
  }
  return s;
}

}  // namespace

GhResult gh_upper_bound(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY, double eps,
                        const GhSearchOptions& opt, std::uint64_t seed) {
  if (!(eps > 0)) throw std::invalid_argument("gh_upper_bound: eps must be positive");
  if (DX.size() == 0 || DY.size() == 0) throw std::invalid_argument("gh_upper_bound: empty space");
  if (!opt.hint.empty() && static_cast<int>(opt.hint.size()) != DX.size())
    throw std::invalid_argument("gh_upper_bound: hint has wrong length");
  const PairState start = initial_pairing(DX, DY, eps, opt);
  GhResult res;
  res.greedy_delta = start.max_distortion();
  std::vector<int> best_x = start.xs, best_y = start.ys;
  double best = res.greedy_delta;

  const double scale = std::max({DX.d.maxCoeff(), DY.d.maxCoeff(), 1e-300});
  const std::vector<int> nnx = nearest_lists(DX, 8), nny = nearest_lists(DY, 8);
  const int kx = DX.size() > 1 ? static_cast<int>(nnx.size() / DX.size()) : 0;
  const int ky = DY.size() > 1 ? static_cast<int>(nny.size() / DY.size()) : 0;

  for (int r = 0; r < opt.restarts; ++r) {
    PairState s = start;
    const int L = s.size();
    if (L < 2) break;
    std::mt19937_64 rng(seed + 1000003ULL * r);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, L - 1);
    double e = s.energy(opt.rms_weight);
    double T = opt.t0 * scale;
    for (int it = 0; it < opt.iterations; ++it, T *= opt.cooling) {
      const double mv = U(rng);
      const int i = pick(rng);
      const int ox = s.xs[i], oy = s.ys[i];
      int j = -1;
      if (mv < 0.4) {
        j = pick(rng);
        if (j == i) continue;
        const int jy = s.ys[j];
        s.set_pair(i, ox, jy);
        s.set_pair(j, s.xs[j], oy);
      } else if (mv < 0.75) {
        int y = (U(rng) < 0.5 && ky > 0) ? nny[static_cast<size_t>(oy) * ky + static_cast<int>(U(rng) * ky)]
                                         : static_cast<int>(U(rng) * DY.size());
        s.set_pair(i, ox, std::min(y, DY.size() - 1));
      } else {
        int x = (U(rng) < 0.5 && kx > 0) ? nnx[static_cast<size_t>(ox) * kx + static_cast<int>(U(rng) * kx)]
                                         : static_cast<int>(U(rng) * DX.size());
        s.set_pair(i, std::min(x, DX.size() - 1), oy);
      }
      bool ok = s.covered();
      double ne = ok ? s.energy(opt.rms_weight) : 0.0;
      if (ok && (ne <= e || U(rng) < std::exp(-(ne - e) / std::max(T, 1e-300)))) {
        e = ne;
        double m = s.max_distortion();
        if (m < best) {
          best = m;
          best_x = s.xs;
          best_y = s.ys;
        }
      } else {
        // revert
        if (j >= 0) {
          const int jy = s.ys[i];
          s.set_pair(j, s.xs[j], jy);
          s.set_pair(i, ox, oy);
        } else {
          s.set_pair(i, ox, oy);
        }
      }
    }
  }
  res.witness.xs = best_x;
  res.witness.ys = best_y;
  res.witness.eps = eps;
  res.witness.delta = pair_distortion(DX, DY, best_x, best_y);
  res.bound = 2 * eps + res.witness.delta;
  return res;
}

namespace {

struct Backtrack {
  const FiniteMetricSpace& X;
  const FiniteMetricSpace& Y;
  double thr;
  bool strict;
  std::vector<std::pair<int, int>> chosen;

  bool ok(int x, int y) const {
    for (auto [a, b] : chosen) {
      double d = std::abs(X(x, a) - Y(y, b));
      if (strict ? !(d < thr) : !(d <= thr)) return false;
    }
    return true;
  }
  bool assign_x(int x) {
    if (x == X.size()) return cover_y();
    for (int y = 0; y < Y.size(); ++y)
      if (ok(x, y)) {
        chosen.push_back({x, y});
        if (assign_x(x + 1)) return true;
        chosen.pop_back();
      }
    return false;
  }
  bool cover_y() {
    int miss = -1;
    for (int y = 0; y < Y.size() && miss < 0; ++y) {
      bool hit = false;
      for (auto& c : chosen) hit |= c.second == y;
      if (!hit) miss = y;
    }
    if (miss < 0) return true;
    for (int x = 0; x < X.size(); ++x)
      if (ok(x, miss)) {
        chosen.push_back({x, miss});
        if (cover_y()) return true;
        chosen.pop_back();
      }
    return false;
  }
};

void check_tiny(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY) {
  if (DX.size() > 6 || DY.size() > 6) throw std::invalid_argument("size-too-large");
  if (DX.size() == 0 || DY.size() == 0) throw std::invalid_argument("empty space");
}

}  // namespace

double gh_brute_force(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY) {
  check_tiny(DX, DY);
  std::vector<double> cand;
  for (int a = 0; a < DX.size(); ++a)
    for (int c = 0; c < DX.size(); ++c)
      for (int b = 0; b < DY.size(); ++b)
        for (int d = 0; d < DY.size(); ++d) cand.push_back(std::abs(DX(a, c) - DY(b, d)));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  int lo = 0, hi = static_cast<int>(cand.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    Backtrack bt{DX, DY, cand[mid], false, {}};
    if (bt.assign_x(0))
      hi = mid;
    else
      lo = mid + 1;
  }
  return 0.5 * cand[lo];
}

std::optional<ApproximationWitness> find_approximation(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY,
                                                       double r) {
  check_tiny(DX, DY);
  Backtrack bt{DX, DY, r, true, {}};
  if (!bt.assign_x(0)) return std::nullopt;
  ApproximationWitness w;
  for (auto [x, y] : bt.chosen) {
    w.xs.push_back(x);
    w.ys.push_back(y);
  }
  w.eps = r;
  w.delta = pair_distortion(DX, DY, w.xs, w.ys);
  return w;
}

namespace {

double chord(const Manifold& M, const Point& p, const Point& q) {
  auto a = M.embed(p), b = M.embed(q);
  if (a && b) return (*a - *b).norm();
  auto d = M.difference(p, q);
  return d ? d->norm() : std::numeric_limits<double>::infinity();
}

}  // namespace

QuotientSample quotient_sample(const FoliatedModel& m, int n, std::uint64_t seed, int k_neighbors) {
  const Manifold& M = *m.metric->manifold();
  QuotientSample out;
  if (m.leaf_dim >= m.dim() || !m.leaf_map) {
    out.leaves = {sample_manifold(M, 1, seed).points[0]};
    out.D.d = Mat::Zero(1, 1);
    return out;
  }
  const int l = m.leaf_dim;
  const int per = l == 1 ? 48 : 12;
  auto coarse_of = [&](const Point& p) {
    std::vector<Point> c;
    for (int i = 0; i < (l == 1 ? per : per * per); ++i) {
      Vec th(l);
      th(0) = (i % per) * m.leaf_periods(0) / per;
      if (l == 2) th(1) = (i / per) * m.leaf_periods(1) / per;
      c.push_back(m.leaf_map(p, th));
    }
    return c;
  };
  auto to_leaf = [&](const Point& x, const std::vector<Point>& leaf) {
    double c = std::numeric_limits<double>::infinity();
    for (const Point& q : leaf) c = std::min(c, chord(M, x, q));
    return c;
  };
  // Representatives: farthest-point selection from a random pool, so the leaf space is
  // covered without holes (a k-nearest graph detours around holes).
  std::vector<Point> pool =
      m.leaf_representatives ? m.leaf_representatives(n, seed) : sample_manifold(M, std::max(n, 6 * n), seed).points;
  std::vector<double> mind(pool.size(), std::numeric_limits<double>::infinity());
  std::vector<std::vector<Point>> coarse;
  int next = 0;
  for (int a = 0; a < n; ++a) {
    if (m.leaf_representatives) next = a;
    out.leaves.push_back(pool[next]);
    coarse.push_back(coarse_of(pool[next]));
    mind[next] = 0;
    for (size_t i = 0; i < pool.size(); ++i)
      if (mind[i] > 0) mind[i] = std::min(mind[i], to_leaf(pool[i], coarse.back()));
    next = static_cast<int>(std::max_element(mind.begin(), mind.end()) - mind.begin());
  }
  WeightedGraph G;
  G.adj.resize(n);
  std::vector<std::pair<double, int>> cand(n);
  const int k = std::min(k_neighbors, n - 1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double c = std::numeric_limits<double>::infinity();
      if (b != a)
        c = to_leaf(out.leaves[a], coarse[b]);
      cand[b] = {c, b};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (int i = 0; i < k; ++i) {
      int b = cand[i].second;
      double w = distance_to_leaf(m, *m.metric, out.leaves[a], out.leaves[b], l == 1 ? 16 : 10);
      if (!std::isfinite(w)) continue;
      G.adj[a].push_back({b, w});
      G.adj[b].push_back({a, w});
    }
  }
  if (!is_connected(G)) throw std::runtime_error("disconnected-graph");
  out.D.d = Mat(n, n);
  for (int a = 0; a < n; ++a) {
    std::vector<double> d = dijkstra(G, {a});
    for (int b = 0; b < n; ++b) out.D.d(a, b) = d[b];
  }
  out.D.d = out.D.d.cwiseMin(out.D.d.transpose()).eval();
  out.D.d.diagonal().setZero();
  return out;
}

LeafPoints leaf_points(const FoliatedModel& m, const std::vector<Point>& leaves, int per_leaf, std::uint64_t seed) {
  LeafPoints out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int l = m.leaf_map ? m.leaf_dim : 0;
  // grid side per leaf direction
  const int side = l == 2 ? std::max(1, static_cast<int>(std::lround(std::sqrt(per_leaf)))) : per_leaf;
  for (size_t a = 0; a < leaves.size(); ++a) {
    Vec off(l);
    for (int c = 0; c < l; ++c) off(c) = U(rng);
    for (int i = 0; i < per_leaf; ++i) {
      Vec th = Vec::Zero(l);
      if (l == 1) th(0) = (i + off(0)) / per_leaf * m.leaf_periods(0);
      if (l == 2) {
        th(0) = ((i % side) + off(0)) / side * m.leaf_periods(0);
        th(1) = ((i / side) % side + off(1)) / side * m.leaf_periods(1);
      }
      out.points.push_back(l == 0 ? leaves[a] : m.leaf_map(leaves[a], th));
      out.leaf.push_back(static_cast<int>(a));
      out.theta.push_back(th);
    }
  }
  return out;
}

namespace {

// shortest periodic representative of b - a
Vec periodic_step(const Vec& a, const Vec& b, const Vec& periods) {
  Vec d = b - a;
  for (int c = 0; c < d.size(); ++c) d(c) -= periods(c) * std::round(d(c) / periods(c));
  return d;
}

}  // namespace

std::vector<std::tuple<int, int, double>> leaf_edges(const FoliatedModel& m, const MetricField& g,
                                                     const LeafPoints& lp, int subdiv) {
  std::vector<std::tuple<int, int, double>> out;
  if (!m.leaf_map || m.leaf_dim == 0) return out;
  const int l = m.leaf_dim;
  const int nbrs = 2 * l;
  std::map<int, std::vector<int>> by_leaf;
  for (size_t i = 0; i < lp.points.size(); ++i) by_leaf[lp.leaf[i]].push_back(static_cast<int>(i));
  std::set<std::pair<int, int>> done;
  for (const auto& [leaf, idx] : by_leaf) {
    const Point& base = lp.points[idx[0]];
    const Vec& th0 = lp.theta[idx[0]];
    for (int i : idx) {
      std::vector<std::pair<double, int>> near;
      for (int j : idx) {
        if (j == i) continue;
        Vec d = periodic_step(lp.theta[i], lp.theta[j], m.leaf_periods);
        near.emplace_back(d.cwiseQuotient(m.leaf_periods).norm(), j);
      }
      int c = std::min<int>(nbrs, static_cast<int>(near.size()));
      std::partial_sort(near.begin(), near.begin() + c, near.end());
      for (int a = 0; a < c; ++a) {
        int j = near[a].second;
        if (!done.insert({std::min(i, j), std::max(i, j)}).second) continue;
        Vec step = periodic_step(lp.theta[i], lp.theta[j], m.leaf_periods);
        // parameters relative to the leaf's base point
        Vec ti = lp.theta[i] - th0;
        double len = 0;
        Point prev = m.leaf_map(base, ti);
        for (int s = 1; s <= subdiv && std::isfinite(len); ++s) {
          Point cur = m.leaf_map(base, ti + step * (static_cast<double>(s) / subdiv));
          len += segment_length(g, prev, cur);
          prev = cur;
        }
        if (std::isfinite(len)) out.emplace_back(i, j, len);
      }
    }
  }
  return out;
}

FiniteMetricSpace leaf_graph_distances(const FoliatedModel& m, const MetricField& g, const LeafPoints& lp,
                                       int k_neighbors, int subdiv, int segment_nodes) {
  GraphOptions opt;
  opt.segment_nodes = segment_nodes;
  if (m.leaf_map && m.leaf_dim > 0) opt.group = lp.leaf;
  opt.extra_edges = leaf_edges(m, g, lp, subdiv);
  return geodesic_distances(g, lp.points, k_neighbors, opt);
}

}  // namespace clab
