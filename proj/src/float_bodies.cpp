#include "randpoly/float_bodies.hpp"

#include <algorithm>
#include <cmath>

#include "randpoly/error.hpp"
#include "randpoly/json_io.hpp"
#include "randpoly/quadrature.hpp"
#include "randpoly/sampler.hpp"

namespace randpoly {

namespace {

constexpr double kZ99 = 2.5758293035489004;

/// Largest x > 0 with pred(x) still true, for pred true near 0 and false
/// far out (monotone). Brackets by doubling from `step`.
template <class Pred>
double last_true(Pred&& pred, double step, double rel_tol) {
  double lo = 0.0, hi = step;
  while (pred(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::ConstructionFailure, "root bracket diverged");
  }
  const double tol = rel_tol * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FloatingPolytope floating_polytope(const DensityND& density, NetPtr net, double delta, EvalContext* ctx) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidParameter, "delta must be positive");
  if (delta >= std::exp(-1.0)) throw Error(ErrorKind::PossiblyEmpty, "delta >= 1/e may give an empty floating body");
  if (net->dim() != density.dim()) throw Error(ErrorKind::IncompatibleRepresentation, "net and density dimensions differ");
  const Point center = density.centroid();
  std::vector<double> h(net->size());
  std::vector<QuantileEstimate> qs(net->size());
  double max_ci = 0.0;
  for (std::size_t i = 0; i < net->size(); ++i) {
    const Eigen::VectorXd w = net->direction(i);
    qs[i] = upper_quantile_estimate(density, w, delta, ctx);
    h[i] = qs[i].value - w.dot(center);
    max_ci = std::max({max_ci, qs[i].value - qs[i].lo, qs[i].hi - qs[i].value});
  }
  return {SupportBody(std::move(net), center, std::move(h)), delta, density.ref(), std::move(qs), max_ci};
}

LevelSetBody level_set_body(const DensityND& density, NetPtr net, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidParameter, "delta must be positive");
  if (net->dim() != density.dim()) throw Error(ErrorKind::IncompatibleRepresentation, "net and density dimensions differ");
  const Point& mode = density.mode();
  const double level = -std::log(delta);
  const double g0 = density.g(mode);
  if (!(level > g0)) throw Error(ErrorKind::EmptyLevelSet, "delta is not below the density maximum");
  std::vector<double> rho(net->size());
  const double step = std::max(0.5, 0.1 * density.truncation_radius());
  for (std::size_t i = 0; i < net->size(); ++i) {
    const Eigen::VectorXd w = net->direction(i);
    rho[i] = last_true([&](double r) { return density.g(mode + r * w) < level; }, step, 1e-14);
  }
  return {RadialBody(std::move(net), mode, std::move(rho)), delta, density.ref()};
}

RadonBody radon_body(const DensityND& density, NetPtr net, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidParameter, "delta must be positive");
  if (net->dim() != density.dim()) throw Error(ErrorKind::IncompatibleRepresentation, "net and density dimensions differ");
  const Point& mode = density.mode();
  std::vector<double> h(net->size());
  const double step = std::max(0.5, 0.1 * density.truncation_radius());
  for (std::size_t i = 0; i < net->size(); ++i) {
    const Eigen::VectorXd w = net->direction(i);
    const double t0 = w.dot(mode);
    if (!(radon(density, w, t0) > delta))
      throw Error(ErrorKind::DeltaTooLarge, "delta exceeds the hyperplane integral through the mode");
    h[i] = last_true([&](double s) { return radon(density, w, t0 + s) > delta; }, step, 1e-13);
  }
  return {SupportBody(std::move(net), mode, std::move(h)), delta, density.ref()};
}

double cap_area(const planar::Polygon& polygon, const planar::Vec2& w, double t) {
  const planar::Polygon cap = planar::clip_above(polygon, w, t);
  return cap.size() < 3 ? 0.0 : std::abs(planar::signed_area(cap));
}

SupportBody convex_floating_body_2d(const planar::Polygon& polygon, double lambda, NetPtr net) {
  if (!planar::is_convex_ccw(polygon)) throw Error(ErrorKind::InvalidPolygon, "polygon must be convex and counter-clockwise");
  if (!(lambda > 0.0 && lambda < 0.5)) throw Error(ErrorKind::InvalidParameter, "lambda must lie in (0, 1/2)");
  if (net->dim() != 2) throw Error(ErrorKind::IncompatibleRepresentation, "convex floating body needs a planar net");
  const double total = planar::signed_area(polygon);
  const planar::Vec2 c = planar::centroid(polygon);
  double diam = 0.0;
  for (const auto& a : polygon)
    for (const auto& b : polygon) diam = std::max(diam, (a - b).norm());
  std::vector<double> h(net->size());
  for (std::size_t i = 0; i < net->size(); ++i) {
    const planar::Vec2 w(net->directions()(0, static_cast<Eigen::Index>(i)),
                         net->directions()(1, static_cast<Eigen::Index>(i)));
    double lo = w.dot(polygon.front()), hi = lo;
    for (const auto& v : polygon) {
      lo = std::min(lo, w.dot(v));
      hi = std::max(hi, w.dot(v));
    }
    const double target = lambda * total;
    const double t = quad::bisect_first_true([&](double s) { return cap_area(polygon, w, s) <= target; }, lo, hi,
                                             1e-14 * diam);
    h[i] = t - w.dot(c);
  }
  Point center(2);
  center << c.x(), c.y();
  return {std::move(net), center, std::move(h)};
}

ZetaEstimate zeta(const DensityND& density, double epsilon, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::InvalidParameter, "zeta needs at least one sample");
  const SampleSet set = sample(density, samples, seed);
  const double level = -std::log(epsilon);
  std::size_t below = 0;
  for (Eigen::Index i = 0; i < set.points.cols(); ++i)
    if (density.g(set.points.col(i)) > level) ++below;
  const double n = static_cast<double>(samples);
  const double v = static_cast<double>(below) / n;
  return {v, kZ99 * std::sqrt(std::max(v * (1.0 - v), 1.0 / n) / n), samples};
}

namespace {
std::string meta(double delta, const std::string& ref) {
  return "\"delta\": " + io::format_double(delta) + ", \"density_ref\": " + io::quote(ref);
}
}  // namespace

std::string to_json(const FloatingPolytope& b) { return to_json(b.body, meta(b.delta, b.density_ref)); }
std::string to_json(const LevelSetBody& b) { return to_json(b.body, meta(b.delta, b.density_ref)); }
std::string to_json(const RadonBody& b) { return to_json(b.body, meta(b.delta, b.density_ref)); }

}  // namespace randpoly
