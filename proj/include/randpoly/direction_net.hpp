#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace randpoly {

/// An eps-net on the unit sphere S^{dim-1}: distinct directions are more
/// than eps apart and every unit vector is within eps of some direction.
///
/// dim = 1 is {-1, +1}; dim = 2 is the uniform angular net with the fewest
/// directions whose covering chord is <= eps; dim >= 3 is greedy maximal
/// separation over a shifted Halton pool, closed up with random passes.
/// Immutable once built.
class DirectionNet {
 public:
  static DirectionNet build(int dim, double eps, std::uint64_t seed);

  /// Wraps caller-supplied directions (columns of a dim x k matrix). Only
  /// the unit-norm check is performed; use validate() for the rest.
  static DirectionNet from_directions(double eps, std::uint64_t seed, Eigen::MatrixXd directions,
                                      double covering_radius);

  int dim() const noexcept { return static_cast<int>(dirs_.rows()); }
  double eps() const noexcept { return eps_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double covering_radius() const noexcept { return covering_radius_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(dirs_.cols()); }

  /// dim x size matrix, one unit direction per column.
  const Eigen::MatrixXd& directions() const noexcept { return dirs_; }
  Eigen::VectorXd direction(std::size_t i) const { return dirs_.col(static_cast<Eigen::Index>(i)); }

  /// The net directions followed by 4x as many seeded uniform random unit
  /// vectors; used wherever a supremum over the sphere is approximated.
  const Eigen::MatrixXd& probe_directions() const noexcept { return probes_; }

  /// Index of the direction closest to theta in Euclidean distance.
  std::size_t nearest(const Eigen::VectorXd& theta) const;

  /// Identity key "net:dim=<d>:eps=<eps>:seed=<seed>"; build() is
  /// deterministic, so the key is enough to regenerate the net.
  std::string ref() const;

 private:
  DirectionNet(double eps, std::uint64_t seed, Eigen::MatrixXd dirs, double covering);

  double eps_;
  std::uint64_t seed_;
  Eigen::MatrixXd dirs_;
  double covering_radius_;
  Eigen::MatrixXd probes_;
};

using NetPtr = std::shared_ptr<const DirectionNet>;

/// Process-wide cache keyed by (dim, eps, seed); bodies built against the
/// same key share one net instance.
NetPtr shared_net(int dim, double eps, std::uint64_t seed);

/// Rebuilds (or fetches) the net named by DirectionNet::ref().
NetPtr net_from_ref(std::string_view ref);

struct NetReport {
  bool unit_norm = false;
  bool packing = false;
  bool covering = false;
  bool cardinality = false;
  double min_separation = 0.0;
  double covering_radius = 0.0;  // exact in dim <= 2, probe maximum otherwise

  bool ok() const noexcept { return unit_norm && packing && covering && cardinality; }
};

/// Checks all net invariants for `directions` as an eps-net. Packing is
/// checked over every pair; covering is exact in dim <= 2 and uses `probes`
/// uniform random directions otherwise.
NetReport validate_directions(const Eigen::MatrixXd& directions, double eps, std::size_t probes,
                              std::uint64_t probe_seed);

inline NetReport validate(const DirectionNet& net, std::size_t probes, std::uint64_t probe_seed) {
  return validate_directions(net.directions(), net.eps(), probes, probe_seed);
}

/// Exact covering chord of a finite set of unit vectors in the plane.
double covering_radius_2d(const Eigen::MatrixXd& directions);

struct SeriesDecomposition {
  std::vector<std::size_t> indices;  // i_0, i_1, ..., one more than coefficients
  std::vector<double> coefficients;  // eps_1, ..., with 0 <= eps_j <= eps^j
  double residual_norm = 0.0;
};

/// theta = w[i_0] + sum_j eps_j w[i_j] + r with |r| <= eps^{k+1}, by the
/// greedy recursion on normalised residuals. Stops early on an exact hit.
SeriesDecomposition series_decompose(const Eigen::VectorXd& theta, const DirectionNet& net, int k);

/// max over the net of <x, w>; lies in [(1 - eps)|x|, |x|].
double net_functional(const Eigen::VectorXd& x, const DirectionNet& net);

/// {dim, eps, seed, covering_radius, directions} with 17 significant digits.
std::string to_json(const DirectionNet& net);
DirectionNet net_from_json(std::string_view text);

}  // namespace randpoly
