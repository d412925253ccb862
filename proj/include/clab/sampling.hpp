#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clab/manifold.hpp"

namespace clab {

// Points plus chart-measure quadrature weights: sum_i w_i f(p_i) ~ integral of f over the atlas.
struct SampleSet {
  std::vector<Point> points;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  std::string scheme;
  bool monte_carlo = true;
  int size() const { return static_cast<int>(points.size()); }
};

// Draws from the manifold's reference probability measure. Prefix-stable in n.
SampleSet sample_manifold(const Manifold& m, int n, std::uint64_t seed);

// Midpoint grid on a flat torus, `per_dim` nodes per axis.
SampleSet grid_torus(const FlatTorus& m, int per_dim);

// Gauss-Legendre nodes/weights on [a,b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

// Product grid on S^3 (stereographic atlas) in the Clifford parameters
// (s, xi1, xi2), z1 = cos s e^{i xi1}, z2 = sin s e^{i xi2}.
// s-nodes are Gauss-Legendre panels between the given breakpoints in [0, pi/2].
SampleSet grid_s3_clifford(const Sphere& s3, const std::vector<double>& breakpoints, int nodes_per_panel,
                           int n_xi, double xi_offset = 0.0);

// Stratified draw on S^3: s takes the given values, xi1, xi2 uniform.
SampleSet stratified_s3(const Sphere& s3, const std::vector<double>& s_values, std::uint64_t seed);

Point s3_point_from_clifford(const Sphere& s3, double s, double xi1, double xi2);

}  // namespace clab
