#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "randpoly/convex_body.hpp"
#include "randpoly/density.hpp"

namespace randpoly {

/// n i.i.d. draws, one per column.
struct SampleSet {
  int dim = 0;
  std::size_t n = 0;
  Eigen::MatrixXd points;
  std::uint64_t seed = 0;
  std::string density_ref;
};

/// Reproducible i.i.d. sample: the same (density, n, seed) gives
/// bit-identical points. General densities are drawn by rejection against
/// their exponential envelope.
SampleSet sample(const DensityND& density, std::size_t n, std::uint64_t seed);

/// Uniform points in a convex ccw polygon by bounding-box rejection.
Eigen::Matrix2Xd sample_polygon(const planar::Polygon& polygon, std::size_t n, Rng& rng);

struct PrefilterStats {
  std::size_t kept = 0;
  std::size_t discarded = 0;
  bool verified = true;
};

/// Support values of the sample hull about the sample mean. d = 2 keeps
/// only exact hull vertices; d = 3 drops points strictly inside a ball
/// that every net halfspace already contains. A degenerate hull shows up
/// as !center_interior() on the result.
SupportBody random_polytope(const SampleSet& samples, NetPtr net, PrefilterStats* stats = nullptr);

/// Same values from every point, no prefilter.
SupportBody random_polytope_brute_force(const SampleSet& samples, NetPtr net);

/// Exact number of hull vertices in the plane.
std::size_t vertex_count_2d(const SampleSet& samples);

/// Column-major f64 dump plus "<path>.json" sidecar {dim, n, seed, density}.
void write_samples(const SampleSet& samples, const std::string& path);

}  // namespace randpoly
