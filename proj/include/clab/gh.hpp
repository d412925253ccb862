#pragma once
// Gromov-Hausdorff machinery on finite metric spaces: nets, approximations,
// an upper-bound search over correspondences, an exact oracle for tiny spaces,
// and finite samples of leaf spaces.

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "clab/foliation.hpp"
#include "clab/metric_space.hpp"

namespace clab {

struct NetWitness {
  std::vector<int> indices;
  double eps = 0;
};

// Greedy farthest-point net, started at index 0.
NetWitness epsilon_net(const FiniteMetricSpace& D, double eps);
// max over points of the distance to the subset
double cover_radius(const FiniteMetricSpace& D, const std::vector<int>& subset);

struct ApproximationWitness {
  std::vector<int> xs, ys;
  double eps = 0;
  double delta = 0;  // max pairwise distortion
};

double pair_distortion(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY, const std::vector<int>& xs,
                       const std::vector<int>& ys);

struct WitnessCheck {
  double cover_x = 0, cover_y = 0, distortion = 0;
  bool valid = false;  // both covers <= eps, distortion == delta
};
WitnessCheck verify_witness(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY, const ApproximationWitness& w);

struct GhSearchOptions {
  int iterations = 20000;  // annealing steps per restart
  int restarts = 2;
  double t0 = 0.02;        // initial temperature, relative to the larger diameter
  double cooling = 0.9997; // per step; independent of the budget so longer runs extend shorter ones
  double rms_weight = 0.1; // energy = max distortion + rms_weight * rms distortion
  std::vector<int> hint;   // optional: X index -> Y index used to seed the pairing
};

struct GhResult {
  double bound = 0;  // 2 eps + delta
  double greedy_delta = 0;
  ApproximationWitness witness;
};

GhResult gh_upper_bound(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY, double eps,
                        const GhSearchOptions& opt, std::uint64_t seed);

// Exact d_GH = 1/2 min over correspondences of the distortion. At most 6 points each.
double gh_brute_force(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY);
// Exhaustive search for an (r, r)-approximation with strict distortion < r (r = 5 eps for part (2)).
std::optional<ApproximationWitness> find_approximation(const FiniteMetricSpace& DX, const FiniteMetricSpace& DY,
                                                       double r);

struct QuotientSample {
  FiniteMetricSpace D;            // leaf-space distances
  std::vector<Point> leaves;      // one representative per leaf
};
// n leaves, local leaf distances on a k-nearest leaf graph, closed by shortest paths.
QuotientSample quotient_sample(const FoliatedModel& m, int n, std::uint64_t seed, int k_neighbors = 10);

struct LeafPoints {
  std::vector<Point> points;
  std::vector<int> leaf;    // index of the leaf each point lies on
  std::vector<Vec> theta;   // leaf parameter of each point
};
// per_leaf points on each leaf: an evenly spaced parameter grid with a random offset per leaf.
LeafPoints leaf_points(const FoliatedModel& m, const std::vector<Point>& leaves, int per_leaf, std::uint64_t seed);

// Edges between parameter-neighbours on the same leaf, weighted by the g-length of the leaf arc
// (polyline with `subdiv` pieces). These are lengths of actual curves, so they only shorten
// graph distances towards the true ones.
std::vector<std::tuple<int, int, double>> leaf_edges(const FoliatedModel& m, const MetricField& g,
                                                     const LeafPoints& lp, int subdiv = 12);
// k-NN graph distances plus the leaf edges.
FiniteMetricSpace leaf_graph_distances(const FoliatedModel& m, const MetricField& g, const LeafPoints& lp,
                                       int k_neighbors, int subdiv = 12, int segment_nodes = 4);

}  // namespace clab
