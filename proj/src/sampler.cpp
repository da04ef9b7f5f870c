#include "randpoly/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "randpoly/error.hpp"
#include "randpoly/hull2d.hpp"
#include "randpoly/json_io.hpp"
#include "randpoly/quadrature.hpp"

namespace randpoly {

namespace {

/// Inverse CDF table for the radius of a radial density, whose law has
/// density proportional to r^{d-1} exp(-psi(r)) on [0, truncation].
class RadiusTable {
 public:
  explicit RadiusTable(const DensityND& d) {
    constexpr int kCells = 4096;
    const double top = d.truncation_radius();
    const double psi0 = d.psi(0.0);
    const int k = d.dim() - 1;
    r_.resize(kCells + 1);
    cum_.assign(kCells + 1, 0.0);
    for (int i = 0; i <= kCells; ++i) r_[static_cast<std::size_t>(i)] = top * i / kCells;
    for (int i = 0; i < kCells; ++i) {
      const double mass = quad::integrate([&](double r) { return std::pow(r, k) * std::exp(psi0 - d.psi(r)); },
                                          r_[static_cast<std::size_t>(i)], r_[static_cast<std::size_t>(i) + 1], 1e-10, 6);
      cum_[static_cast<std::size_t>(i) + 1] = cum_[static_cast<std::size_t>(i)] + mass;
    }
    const double total = cum_.back();
    for (double& c : cum_) c /= total;
  }

  double radius(double u) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), 1, cum_.size() - 1);
    const double span = cum_[i] - cum_[i - 1];
    const double frac = span > 0.0 ? (u - cum_[i - 1]) / span : 0.5;
    return r_[i - 1] + frac * (r_[i] - r_[i - 1]);
  }

 private:
  std::vector<double> r_;
  std::vector<double> cum_;
};

}  // namespace

Eigen::Matrix2Xd sample_polygon(const planar::Polygon& polygon, std::size_t n, Rng& rng) {
  planar::Vec2 lo = polygon.front(), hi = polygon.front();
  for (const auto& v : polygon) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  Eigen::Matrix2Xd out(2, static_cast<Eigen::Index>(n));
  std::size_t filled = 0;
  while (filled < n) {
    const planar::Vec2 x(lo.x() + (hi.x() - lo.x()) * rng.uniform(), lo.y() + (hi.y() - lo.y()) * rng.uniform());
    bool inside = true;
    for (std::size_t i = 0; i < polygon.size() && inside; ++i)
      inside = planar::cross(polygon[i], polygon[(i + 1) % polygon.size()], x) >= 0.0;
    if (inside) out.col(static_cast<Eigen::Index>(filled++)) = x;
  }
  return out;
}

SampleSet sample(const DensityND& density, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "sample size must be >= 1");
  const int dim = density.dim();
  SampleSet s{dim, n, Eigen::MatrixXd(dim, static_cast<Eigen::Index>(n)), seed, density.ref()};
  Rng rng(seed);
  const auto cols = static_cast<Eigen::Index>(n);
  switch (density.klass()) {
    case DensityND::Class::Gaussian:
      for (Eigen::Index j = 0; j < cols; ++j)
        for (int i = 0; i < dim; ++i) s.points(i, j) = rng.normal();
      break;
    case DensityND::Class::SchechtmanZinn:
    case DensityND::Class::Product:
      for (Eigen::Index j = 0; j < cols; ++j)
        for (int i = 0; i < dim; ++i) s.points(i, j) = density.factors()[static_cast<std::size_t>(i)].sample(rng);
      break;
    case DensityND::Class::Radial: {
      const RadiusTable table(density);
      for (Eigen::Index j = 0; j < cols; ++j) {
        const Eigen::VectorXd u = rng.direction(dim);
        s.points.col(j) = table.radius(rng.uniform()) * u;
      }
      break;
    }
    case DensityND::Class::UniformPolygon:
      s.points = sample_polygon(density.polygon(), n, rng);
      break;
    case DensityND::Class::General: {
      const Envelope& env = density.envelope();
      const Point& mode = density.mode();
      std::size_t proposed = 0;
      Eigen::Index filled = 0;
      while (filled < cols) {
        // Proposal: uniform direction, radius ~ Gamma(dim, 1/m).
        const double r = rng.gamma(dim) / env.m;
        const Point x = mode + r * rng.direction(dim);
        ++proposed;
        const double log_accept = -density.g(x) + env.m * r - env.c0;
        if (log_accept > 1e-9) throw Error(ErrorKind::EnvelopeFailure, "density exceeds its rejection envelope");
        if (std::log(rng.uniform()) < log_accept) s.points.col(filled++) = x;
        if (proposed >= 10000 && static_cast<double>(filled) < 1e-4 * static_cast<double>(proposed))
          throw Error(ErrorKind::EnvelopeFailure, "rejection acceptance rate below 1e-4");
      }
      break;
    }
  }
  return s;
}

namespace {

Point sample_mean(const SampleSet& s) { return s.points.rowwise().mean(); }

void check_polytope_input(const SampleSet& s, const NetPtr& net) {
  if (net->dim() != s.dim) throw Error(ErrorKind::IncompatibleRepresentation, "net and sample dimensions differ");
  if (s.points.cols() < s.dim + 1) throw Error(ErrorKind::DegenerateHull, "need at least dim + 1 points");
}

}  // namespace

SupportBody random_polytope_brute_force(const SampleSet& s, NetPtr net) {
  check_polytope_input(s, net);
  return support_of_points(s.points, std::move(net), sample_mean(s));
}

SupportBody random_polytope(const SampleSet& s, NetPtr net, PrefilterStats* stats) {
  check_polytope_input(s, net);
  const Point center = sample_mean(s);
  PrefilterStats local;
  PrefilterStats& st = stats ? *stats : local;
  st = PrefilterStats{};

  if (s.dim == 2) {
    const planar::Polygon hull = planar::convex_hull(s.points);
    Eigen::MatrixXd kept(2, static_cast<Eigen::Index>(hull.size()));
    for (std::size_t i = 0; i < hull.size(); ++i) kept.col(static_cast<Eigen::Index>(i)) = hull[i];
    st.kept = hull.size();
    st.discarded = static_cast<std::size_t>(s.points.cols()) - hull.size();
    return support_of_points(kept, std::move(net), center);
  }

  if (s.dim == 3) {
    const Eigen::ArrayXd norms = (s.points.colwise() - center).colwise().norm().transpose().array();
    // Directional maxima over the farthest points bound the true maxima from
    // below, so the ball of 0.99 x their minimum never holds a maximiser.
    const Eigen::Index pilot_n = std::min<Eigen::Index>(s.points.cols(), 2000);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(s.points.cols()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::nth_element(order.begin(), order.begin() + (pilot_n - 1), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return norms[a] > norms[b]; });
    Eigen::MatrixXd pilot(3, pilot_n);
    for (Eigen::Index i = 0; i < pilot_n; ++i) pilot.col(i) = s.points.col(order[static_cast<std::size_t>(i)]);
    const SupportBody rough = support_of_points(pilot, net, center);
    const double radius = 0.99 * *std::min_element(rough.values().begin(), rough.values().end());

    std::vector<Eigen::Index> keep;
    double discarded_max = 0.0;
    for (Eigen::Index i = 0; i < s.points.cols(); ++i) {
      if (norms[i] < radius)
        discarded_max = std::max(discarded_max, norms[i]);
      else
        keep.push_back(i);
    }
    Eigen::MatrixXd kept(3, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) kept.col(static_cast<Eigen::Index>(i)) = s.points.col(keep[i]);
    SupportBody body = support_of_points(kept, std::move(net), center);
    st.kept = keep.size();
    st.discarded = static_cast<std::size_t>(s.points.cols()) - keep.size();
    // Every discarded point has <x - c, w> <= |x - c| below each support value.
    const double hmin = *std::min_element(body.values().begin(), body.values().end());
    st.verified = st.discarded == 0 || discarded_max <= hmin;
    if (!st.verified) return random_polytope_brute_force(s, body.net_ptr());
    return body;
  }

  st.kept = static_cast<std::size_t>(s.points.cols());
  return support_of_points(s.points, std::move(net), center);
}

std::size_t vertex_count_2d(const SampleSet& s) {
  if (s.dim != 2) throw Error(ErrorKind::InvalidParameter, "vertex_count_2d needs planar samples");
  if (s.points.cols() < 3) throw Error(ErrorKind::DegenerateHull, "need at least 3 points");
  return planar::convex_hull(s.points).size();
}

void write_samples(const SampleSet& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(s.points.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(s.points.size())));
  io::write_file(path + ".json", "{\"dim\": " + std::to_string(s.dim) + ", \"n\": " + std::to_string(s.n) +
                                     ", \"seed\": " + std::to_string(s.seed) +
                                     ", \"density\": " + io::quote(s.density_ref) + "}\n");
}

}  // namespace randpoly
