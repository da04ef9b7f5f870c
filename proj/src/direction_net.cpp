#include "randpoly/direction_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>

#include <boost/math/special_functions/erf.hpp>
#include "json.hpp"

#include "randpoly/error.hpp"
#include "randpoly/json_io.hpp"
#include "randpoly/rng.hpp"

namespace randpoly {

namespace {

constexpr double kUnitTol = 1e-12;

void check_params(int dim, double eps) {
  if (dim < 1) throw Error(ErrorKind::InvalidParameter, "net dimension must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidParameter, "net eps must lie in (0, 1)");
}

Eigen::MatrixXd angular_net(double eps, double& covering) {
  int k = 2;
  while (2.0 * std::sin(M_PI / (2.0 * k)) > eps) ++k;
  Eigen::MatrixXd dirs(2, k);
  for (int j = 0; j < k; ++j) {
    const double a = 2.0 * M_PI * j / k;
    dirs(0, j) = std::cos(a);
    dirs(1, j) = std::sin(a);
  }
  covering = 2.0 * std::sin(M_PI / (2.0 * k));
  return dirs;
}

/// Uniform grid hash over [-1, 1]^dim with cell side eps; only the 3^dim
/// neighbouring cells can hold points within eps.
class CellGrid {
 public:
  CellGrid(int dim, double eps) : dim_(dim), eps_(eps), base_(static_cast<long>(std::ceil(2.0 / eps)) + 3) {
    if (std::pow(static_cast<double>(base_), dim) > 9.0e18)
      throw Error(ErrorKind::InvalidParameter, "net too fine for the cell grid in this dimension");
  }

  void insert(const Eigen::VectorXd& p, std::uint32_t index) { cells_[key(cell_of(p))].push_back(index); }

  /// Smallest distance from p to a stored point, capped at `cap`.
  double min_distance(const Eigen::VectorXd& p, const Eigen::MatrixXd& store, double cap) const {
    const std::vector<long> c = cell_of(p);
    std::vector<long> probe(c.size());
    std::vector<int> offset(dim_, -1);
    double best = cap;
    for (;;) {
      for (int i = 0; i < dim_; ++i) probe[i] = c[i] + offset[i];
      if (auto it = cells_.find(key(probe)); it != cells_.end()) {
        for (std::uint32_t idx : it->second) best = std::min(best, (store.col(idx) - p).norm());
      }
      int i = 0;
      while (i < dim_ && offset[i] == 1) offset[i++] = -1;
      if (i == dim_) break;
      ++offset[i];
    }
    return best;
  }

 private:
  std::vector<long> cell_of(const Eigen::VectorXd& p) const {
    std::vector<long> c(dim_);
    for (int i = 0; i < dim_; ++i) c[i] = static_cast<long>(std::floor((p[i] + 1.0) / eps_)) + 1;
    return c;
  }
  std::uint64_t key(const std::vector<long>& c) const {
    std::uint64_t k = 0;
    for (int i = dim_ - 1; i >= 0; --i) k = k * static_cast<std::uint64_t>(base_) + static_cast<std::uint64_t>(c[i]);
    return k;
  }

  int dim_;
  double eps_;
  long base_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

class GreedyNet {
 public:
  GreedyNet(int dim, double eps) : dim_(dim), eps_(eps), grid_(dim, eps), store_(dim, 256) {}

  /// Adds p when it is more than eps from every accepted direction.
  bool offer(const Eigen::VectorXd& p) {
    if (grid_.min_distance(p, store_, 2.0 * eps_) <= eps_) return false;
    if (count_ == store_.cols()) store_.conservativeResize(Eigen::NoChange, 2 * store_.cols());
    store_.col(count_) = p;
    grid_.insert(p, static_cast<std::uint32_t>(count_));
    ++count_;
    return true;
  }

  double distance(const Eigen::VectorXd& p) const { return grid_.min_distance(p, store_, 2.0); }

  Eigen::MatrixXd result() const { return store_.leftCols(count_); }

 private:
  int dim_;
  double eps_;
  CellGrid grid_;
  Eigen::MatrixXd store_;
  Eigen::Index count_ = 0;
};

Eigen::MatrixXd greedy_net(int dim, double eps, std::uint64_t seed, double& covering) {
  if (dim > static_cast<int>(std::size(kPrimes)))
    throw Error(ErrorKind::InvalidParameter, "greedy nets support dim <= 16");
  const double volume_bound = std::pow(3.0 / eps, dim);
  const auto pool = static_cast<std::size_t>(std::max(1e5, std::min(50.0 * volume_bound, 1e7)));

  Rng shift_rng(derive_stream(seed, 0));
  std::vector<double> shift(dim);
  for (auto& s : shift) s = shift_rng.uniform();

  GreedyNet net(dim, eps);
  Eigen::VectorXd p(dim);
  for (std::size_t i = 1; i <= pool; ++i) {
    for (int j = 0; j < dim; ++j) {
      double u = radical_inverse(i, kPrimes[j]) + shift[j];
      u -= std::floor(u);
      u = std::clamp(u, 1e-16, 1.0 - 1e-16);
      p[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
    }
    const double n = p.norm();
    if (n < 1e-12) continue;
    net.offer(p / n);
  }

  // The pool is finite, so small holes can remain; random passes fill them
  // until a pass finds nothing uncovered.
  Rng fill(derive_stream(seed, 1));
  for (int pass = 0; pass < 8; ++pass) {
    bool added = false;
    for (std::size_t i = 0; i < pool; ++i) added = net.offer(fill.direction(dim)) || added;
    if (!added) break;
  }

  constexpr std::size_t kProbes = 10000;
  for (int round = 0; round < 10; ++round) {
    Rng probe(derive_stream(seed, 2 + static_cast<std::uint64_t>(round)));
    double worst = 0.0;
    bool added = false;
    for (std::size_t i = 0; i < kProbes; ++i) {
      const Eigen::VectorXd theta = probe.direction(dim);
      const double d = net.distance(theta);
      if (d > eps) added = net.offer(theta) || added;
      worst = std::max(worst, d);
    }
    if (!added) {
      covering = worst;
      return net.result();
    }
  }
  throw Error(ErrorKind::ConstructionFailure,
              "candidate pool exhausted before covering was achieved; retry with a larger pool");
}

}  // namespace

DirectionNet::DirectionNet(double eps, std::uint64_t seed, Eigen::MatrixXd dirs, double covering)
    : eps_(eps), seed_(seed), dirs_(std::move(dirs)), covering_radius_(covering) {
  const Eigen::Index k = dirs_.cols();
  probes_.resize(dirs_.rows(), 5 * k);
  probes_.leftCols(k) = dirs_;
  Rng rng(derive_stream(seed, 0x70726f6265ULL));
  for (Eigen::Index j = k; j < 5 * k; ++j) probes_.col(j) = rng.direction(static_cast<int>(dirs_.rows()));
}

DirectionNet DirectionNet::build(int dim, double eps, std::uint64_t seed) {
  check_params(dim, eps);
  double covering = 0.0;
  Eigen::MatrixXd dirs;
  if (dim == 1) {
    dirs.resize(1, 2);
    dirs << -1.0, 1.0;
  } else if (dim == 2) {
    dirs = angular_net(eps, covering);
  } else {
    dirs = greedy_net(dim, eps, seed, covering);
  }
  if (covering > eps)
    throw Error(ErrorKind::ConstructionFailure, "measured covering radius exceeds eps");
  return DirectionNet(eps, seed, std::move(dirs), covering);
}

DirectionNet DirectionNet::from_directions(double eps, std::uint64_t seed, Eigen::MatrixXd directions,
                                           double covering_radius) {
  if (directions.cols() == 0 || directions.rows() == 0)
    throw Error(ErrorKind::InvalidParameter, "empty direction set");
  for (Eigen::Index j = 0; j < directions.cols(); ++j) {
    if (std::abs(directions.col(j).norm() - 1.0) > kUnitTol)
      throw Error(ErrorKind::InvalidParameter, "net directions must be unit vectors");
  }
  return DirectionNet(eps, seed, std::move(directions), covering_radius);
}

std::size_t DirectionNet::nearest(const Eigen::VectorXd& theta) const {
  Eigen::Index best = 0;
  (dirs_.transpose() * theta).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

std::string DirectionNet::ref() const {
  return "net:dim=" + std::to_string(dim()) + ":eps=" + io::format_double(eps_) +
         ":seed=" + std::to_string(seed_);
}

NetPtr shared_net(int dim, double eps, std::uint64_t seed) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, std::uint64_t>, NetPtr> cache;
  const auto key = std::make_tuple(dim, eps, seed);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto net = std::make_shared<const DirectionNet>(DirectionNet::build(dim, eps, seed));
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(net)).first->second;
}

NetPtr net_from_ref(std::string_view ref) {
  int dim = 0;
  double eps = 0.0;
  unsigned long long seed = 0;
  const std::string s(ref);
  if (std::sscanf(s.c_str(), "net:dim=%d:eps=%lf:seed=%llu", &dim, &eps, &seed) != 3)
    throw Error(ErrorKind::ConfigError, "malformed net reference '" + s + "'");
  return shared_net(dim, eps, seed);
}

double covering_radius_2d(const Eigen::MatrixXd& directions) {
  std::vector<double> angles;
  for (Eigen::Index j = 0; j < directions.cols(); ++j)
    angles.push_back(std::atan2(directions(1, j), directions(0, j)));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * M_PI - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  // The farthest point of an arc gap sits at its midpoint.
  return 2.0 * std::sin(std::min(gap, 2.0 * M_PI) / 4.0);
}

NetReport validate_directions(const Eigen::MatrixXd& dirs, double eps, std::size_t probes,
                              std::uint64_t probe_seed) {
  NetReport r;
  const int dim = static_cast<int>(dirs.rows());
  const Eigen::Index k = dirs.cols();

  r.unit_norm = true;
  for (Eigen::Index j = 0; j < k; ++j)
    r.unit_norm = r.unit_norm && std::abs(dirs.col(j).norm() - 1.0) <= kUnitTol;

  r.min_separation = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      r.min_separation = std::min(r.min_separation, (dirs.col(i) - dirs.col(j)).norm());
  r.packing = r.min_separation > eps;

  if (dim == 1) {
    const bool has_pos = (dirs.array() > 0).any(), has_neg = (dirs.array() < 0).any();
    r.covering_radius = has_pos && has_neg ? 0.0 : 2.0;
  } else if (dim == 2) {
    r.covering_radius = covering_radius_2d(dirs);
  } else {
    Rng rng(probe_seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
      const Eigen::VectorXd theta = rng.direction(dim);
      worst = std::max(worst, (dirs.colwise() - theta).colwise().norm().minCoeff());
    }
    r.covering_radius = worst;
  }
  r.covering = r.covering_radius <= eps;
  r.cardinality = static_cast<double>(k) <= std::pow(3.0 / eps, dim);
  return r;
}

SeriesDecomposition series_decompose(const Eigen::VectorXd& theta, const DirectionNet& net, int k) {
  if (k < 0) throw Error(ErrorKind::InvalidParameter, "series length must be >= 0");
  if (theta.size() != net.dim() || std::abs(theta.norm() - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidParameter, "series_decompose expects a unit vector of the net's dimension");
  SeriesDecomposition out;
  const std::size_t i0 = net.nearest(theta);
  out.indices.push_back(i0);
  Eigen::VectorXd r = theta - net.direction(i0);
  for (int j = 1; j <= k; ++j) {
    const double norm = r.norm();
    if (norm == 0.0) break;
    const std::size_t ij = net.nearest(r / norm);
    out.indices.push_back(ij);
    out.coefficients.push_back(norm);
    r -= norm * net.direction(ij);
  }
  out.residual_norm = r.norm();
  return out;
}

double net_functional(const Eigen::VectorXd& x, const DirectionNet& net) {
  if (x.size() != net.dim()) throw Error(ErrorKind::InvalidParameter, "dimension mismatch");
  return (net.directions().transpose() * x).maxCoeff();
}

std::string to_json(const DirectionNet& net) {
  std::string out = "{\"dim\": " + std::to_string(net.dim()) + ", \"eps\": " + io::format_double(net.eps()) +
                    ", \"seed\": " + std::to_string(net.seed()) +
                    ", \"covering_radius\": " + io::format_double(net.covering_radius()) + ", \"directions\": [";
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (j) out += ", ";
    out += io::format_vector(net.direction(j));
  }
  out += "]}";
  return out;
}

DirectionNet net_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int dim = j.at("dim").get<int>();
    const auto& rows = j.at("directions");
    Eigen::MatrixXd dirs(dim, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t c = 0; c < rows.size(); ++c) {
      if (rows[c].size() != static_cast<std::size_t>(dim))
        throw Error(ErrorKind::ConfigError, "direction has wrong dimension");
      for (int r = 0; r < dim; ++r) dirs(r, static_cast<Eigen::Index>(c)) = rows[c][r].get<double>();
    }
    return DirectionNet::from_directions(j.at("eps").get<double>(), j.at("seed").get<std::uint64_t>(),
                                         std::move(dirs), j.at("covering_radius").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("net JSON: ") + e.what());
  }
}

}  // namespace randpoly
