#include "clab/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace clab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// composite midpoint rule with `nodes` pieces
double segment_in_patch(const MetricField& field, const Point& p, const Vec& d, int nodes) {
  const Manifold& m = *field.manifold();
  double s = 0;
  for (int k = 0; k < nodes; ++k) {
    Vec mid = m.wrap(p.patch, p.coords + ((k + 0.5) / nodes) * d);
    if (!m.contains(p.patch, mid)) return kInf;
    Mat G = field.eval(p.patch, mid);
    s += std::sqrt(std::max(0.0, d.dot(G * d)));
  }
  return s / nodes;
}
}  // namespace

double segment_length(const MetricField& field, const Point& p, const Point& q, int nodes) {
  const Manifold& m = *field.manifold();
  nodes = std::max(1, nodes);
  if (auto d = m.difference(p, q)) {
    double l = segment_in_patch(field, p, *d, nodes);
    if (std::isfinite(l)) return l;
  }
  if (auto d = m.difference(q, p)) return segment_in_patch(field, q, *d, nodes);
  return kInf;
}

WeightedGraph knn_graph(const MetricField& field, const std::vector<Point>& pts, int k, const GraphOptions& opt) {
  const int N = static_cast<int>(pts.size());
  const Manifold& m = *field.manifold();
  std::vector<Mat> G(N);
  for (int i = 0; i < N; ++i) G[i] = field(pts[i]);
  std::map<std::pair<int, int>, double> edges;
  const int ncand = std::min(N - 1, std::max(k, opt.candidate_factor * k));
  std::vector<std::pair<double, int>> approx;
  for (int i = 0; i < N; ++i) {
    approx.clear();
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      if (!opt.group.empty() && opt.group[i] == opt.group[j]) continue;
      auto d = m.difference(pts[i], pts[j]);
      if (!d) continue;
      approx.emplace_back(std::sqrt(std::max(0.0, d->dot(G[i] * *d))), j);
    }
    std::vector<int> chosen;
    if (opt.group.empty()) {
      int c = std::min<int>(ncand, static_cast<int>(approx.size()));
      std::partial_sort(approx.begin(), approx.begin() + c, approx.end());
      for (int a = 0; a < c; ++a) chosen.push_back(approx[a].second);
    } else {
      // a few candidates from each of the ncand nearest groups
      std::sort(approx.begin(), approx.end());
      std::map<int, int> seen;
      for (const auto& [d, j] : approx) {
        int& cnt = seen[opt.group[j]];
        if (cnt == 0 && static_cast<int>(seen.size()) > ncand) break;
        if (cnt++ < 3) chosen.push_back(j);
      }
    }
    std::vector<std::pair<double, int>> exact;
    for (int j : chosen) {
      int lo = std::min(i, j), hi = std::max(i, j);
      auto it = edges.find({lo, hi});
      double len = it != edges.end() ? it->second : segment_length(field, pts[lo], pts[hi], opt.segment_nodes);
      if (std::isfinite(len)) exact.emplace_back(len, j);
    }
    std::sort(exact.begin(), exact.end());
    if (!opt.group.empty()) {
      // shortest edge per group
      std::vector<std::pair<double, int>> best;
      std::map<int, bool> used;
      for (const auto& e : exact)
        if (!used[opt.group[e.second]]) {
          used[opt.group[e.second]] = true;
          best.push_back(e);
        }
      exact.swap(best);
    }
    for (int a = 0; a < std::min<int>(k, static_cast<int>(exact.size())); ++a) {
      int j = exact[a].second;
      edges[{std::min(i, j), std::max(i, j)}] = exact[a].first;
    }
  }
  for (const auto& [i, j, w] : opt.extra_edges) {
    if (i == j || i < 0 || j < 0 || i >= N || j >= N || !std::isfinite(w)) continue;
    auto key = std::make_pair(std::min(i, j), std::max(i, j));
    auto it = edges.find(key);
    if (it == edges.end() || w < it->second) edges[key] = w;
  }
  WeightedGraph g;
  g.adj.resize(N);
  for (const auto& [e, w] : edges) {
    g.adj[e.first].emplace_back(e.second, w);
    g.adj[e.second].emplace_back(e.first, w);
  }
  return g;
}

bool is_connected(const WeightedGraph& g) {
  const int N = g.size();
  if (N == 0) return true;
  std::vector<char> seen(N, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (auto [u, w] : g.adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
  }
  return count == N;
}

std::vector<double> dijkstra(const WeightedGraph& g, const std::vector<int>& sources) {
  std::vector<double> dist(g.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (int s : sources) {
    dist[s] = 0.0;
    pq.emplace(0.0, s);
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [u, w] : g.adj[v]) {
      double nd = d + w;
      if (nd < dist[u]) {
        dist[u] = nd;
        pq.emplace(nd, u);
      }
    }
  }
  return dist;
}

FiniteMetricSpace geodesic_distances(const MetricField& field, const std::vector<Point>& pts, int k,
                                     const GraphOptions& opt) {
  const int N = static_cast<int>(pts.size());
  FiniteMetricSpace D;
  D.d = Mat::Zero(N, N);
  if (N <= 1) return D;
  WeightedGraph g = knn_graph(field, pts, k, opt);
  if (!is_connected(g)) throw std::runtime_error("disconnected-graph");
  for (int i = 0; i < N; ++i) {
    std::vector<double> row = dijkstra(g, {i});
    for (int j = 0; j < N; ++j) D.d(i, j) = row[j];
  }
  for (int i = 0; i < N; ++i) {
    D.d(i, i) = 0.0;
    for (int j = i + 1; j < N; ++j) {
      double v = std::min(D.d(i, j), D.d(j, i));
      D.d(i, j) = D.d(j, i) = v;
    }
  }
  return D;
}

VolumeEstimate volume_estimate(const MetricField& field, const SampleSet& s) {
  const int N = s.size();
  if (static_cast<int>(s.weights.size()) != N) throw std::invalid_argument("volume_estimate: samples lack weights");
  std::vector<double> terms(N);
  VolumeEstimate v;
  for (int i = 0; i < N; ++i) {
    Mat G = field(s.points[i]);
    double det = G.rows() ? G.determinant() : 1.0;
    terms[i] = s.weights[i] * std::sqrt(std::max(0.0, det));
    v.value += terms[i];
  }
  if (s.monte_carlo && N > 1) {
    double mean = v.value / N, var = 0.0;
    for (double t : terms) var += (t - mean) * (t - mean);
    var /= (N - 1);
    v.std_error = std::sqrt(var * N);  // terms already carry the 1/N factor
  }
  return v;
}

std::optional<MetricViolation> validate_metric(const FiniteMetricSpace& D, double sym_tol, double tri_tol) {
  const int N = static_cast<int>(D.d.rows());
  if (D.d.cols() != N) return MetricViolation{"shape"};
  for (int i = 0; i < N; ++i)
    if (D.d(i, i) != 0.0) return MetricViolation{"diagonal", i, i, -1, std::abs(D.d(i, i))};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (!(D.d(i, j) >= 0.0)) return MetricViolation{"negative", i, j, -1, D.d(i, j)};
      if (std::abs(D.d(i, j) - D.d(j, i)) > sym_tol) return MetricViolation{"symmetry", i, j, -1, D.d(i, j) - D.d(j, i)};
    }
  // d(k,i) <= d(i,j) + d(k,j) for all k; columns are contiguous and the matrix is symmetric here
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double dij = D.d(i, j);
      const double* ci = D.d.col(i).data();
      const double* cj = D.d.col(j).data();
      double m = (D.d.col(i) - D.d.col(j)).maxCoeff();
      if (m - dij > tri_tol) {
        for (int k = 0; k < N; ++k)
          if (ci[k] - dij - cj[k] > tri_tol) return MetricViolation{"triangle", k, j, i, ci[k] - dij - cj[k]};
      }
    }
  return std::nullopt;
}

double diameter_estimate(const FiniteMetricSpace& D) { return D.size() ? D.d.maxCoeff() : 0.0; }

}  // namespace clab
