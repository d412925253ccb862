#pragma once
// Graph approximations of intrinsic distance, and volume integration.

#include <tuple>
#include <vector>

#include "clab/metric_field.hpp"
#include "clab/metric_space.hpp"
#include "clab/sampling.hpp"

namespace clab {

// Length of the chart segment p -> q with the metric frozen at its midpoint.
// Returns +inf when no shared patch is available.
// Chart-straight segment; composite midpoint rule with `nodes` pieces.
double segment_length(const MetricField& field, const Point& p, const Point& q, int nodes = 1);

struct GraphOptions {
  int candidate_factor = 3;  // exact midpoint lengths are computed for this many times k candidates
  int segment_nodes = 1;     // quadrature pieces per edge; strongly anisotropic metrics need more
  // edges supplied by the caller (i, j, length), e.g. lengths of known curves; the shorter length wins
  std::vector<std::tuple<int, int, double>> extra_edges;
  // when non-empty, k-NN edges only join points with different labels
  std::vector<int> group;
};

FiniteMetricSpace geodesic_distances(const MetricField& field, const std::vector<Point>& points, int k_neighbors,
                                     const GraphOptions& opt = {});
inline FiniteMetricSpace geodesic_distances(const MetricField& field, const SampleSet& s, int k,
                                            const GraphOptions& opt = {}) {
  return geodesic_distances(field, s.points, k, opt);
}

// Multi-source shortest paths on an already built weighted graph.
struct WeightedGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  int size() const { return static_cast<int>(adj.size()); }
};
WeightedGraph knn_graph(const MetricField& field, const std::vector<Point>& points, int k_neighbors,
                        const GraphOptions& opt = {});
bool is_connected(const WeightedGraph& g);
std::vector<double> dijkstra(const WeightedGraph& g, const std::vector<int>& sources);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic quadrature
  double relative_error() const { return value != 0.0 ? std_error / std::abs(value) : 0.0; }
};

VolumeEstimate volume_estimate(const MetricField& field, const SampleSet& samples);

}  // namespace clab
