#include "randpoly/universal.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "randpoly/error.hpp"
#include "randpoly/float_bodies.hpp"
#include "randpoly/quadrature.hpp"

namespace randpoly {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double breakpoint(int n) { return std::ldexp(1.0, 2 * n * n); }
}  // namespace

double alpha(int n, double t) {
  if (n < 1 || n > 22) throw Error(ErrorKind::InvalidParameter, "schedule index must lie in [1, 22]");
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidParameter, "alpha needs t >= 0");
  return t <= breakpoint(n) ? std::ldexp(t, -n * n) : std::ldexp(1.0, n * n);
}

// --- BodyFamily ------------------------------------------------------------

BodyFamily::BodyFamily(std::vector<SupportBody> bodies, bool check_john) : bodies_(std::move(bodies)) {
  if (bodies_.empty()) throw Error(ErrorKind::InvalidParameter, "body family is empty");
  net_ = bodies_.front().net_ptr();
  const double tol = net_->covering_radius();
  const int d = net_->dim();
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    const SupportBody& k = bodies_[i];
    if (k.net_ptr() != net_ && k.net().ref() != net_->ref())
      throw Error(ErrorKind::IncompatibleRepresentation, "family bodies must share one net");
    if (k.center().norm() != 0.0) throw Error(ErrorKind::InvalidParameter, "family bodies must be stored about 0");
    if (!check_john) continue;
    const Point origin = Point::Zero(d);
    const double r = inradius_about(k, origin);
    const double big_r = circumradius_about(k, origin);
    if (r < 1.0 - tol || big_r > d / (1.0 - tol) + 1e-12)
      throw Error(ErrorKind::InvalidParameter,
                  "family body " + std::to_string(i + 1) + " is not in John position (inradius " + std::to_string(r) +
                      ", circumradius " + std::to_string(big_r) + ")");
  }
}

SupportBody john_shape(const std::string& name, NetPtr net) {
  if (net->dim() != 2) throw Error(ErrorKind::InvalidParameter, "built-in shapes are planar");
  std::vector<double> h(net->size());
  const auto& w = net->directions();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = w(0, static_cast<Eigen::Index>(i)), y = w(1, static_cast<Eigen::Index>(i));
    if (name == "square") {
      h[i] = std::abs(x) + std::abs(y);
    } else if (name == "disk") {
      h[i] = 1.0;
    } else if (name == "triangle") {
      double best = -kInf;
      for (int k = 0; k < 3; ++k) {
        const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 3.0;
        best = std::max(best, 2.0 * (std::cos(a) * x + std::sin(a) * y));
      }
      h[i] = best;
    } else {
      throw Error(ErrorKind::ConfigError, "unknown shape '" + name + "'");
    }
  }
  return {std::move(net), Point::Zero(2), std::move(h)};
}

// --- KappaMap --------------------------------------------------------------

SupportBody KappaMap::at(double t) const {
  if (!(t >= 0.0)) throw Error(ErrorKind::InvalidParameter, "kappa needs t >= 0");
  const NetPtr& net = family_.net();
  std::vector<double> h(net->size(), 0.0);
  for (int n = 1; n <= n_max(); ++n) {
    const double a = alpha(n, t);
    const auto& hn = family_.body(n).values();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += a * hn[i];
  }
  return {net, Point::Zero(net->dim()), std::move(h)};
}

double KappaMap::truncation_bound(double t) const {
  double sum = 0.0;
  for (int j = n_max() + 1; j <= 22; ++j) {
    const double a = alpha(j, t);
    sum += a;
    if (a < 1e-300) break;
  }
  return sum * 2.0 * family_.dim();
}

double KappaMap::g(const Point& x) const {
  const NetPtr& net = family_.net();
  if (x.size() != net->dim()) throw Error(ErrorKind::InvalidParameter, "point has the wrong dimension");
  const Eigen::VectorXd proj = net->directions().transpose() * x;
  const int big_n = n_max();
  double g = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    const double a = proj[i];
    if (a <= 0.0) continue;
    // On [T_{n-1}, T_n] the support value is sum_{m<n} 2^{m^2} h_m + t sum_{m>=n} 2^{-m^2} h_m.
    double fixed = 0.0;
    double t_hit = kInf;
    for (int n = 1; n <= big_n; ++n) {
      double slope = 0.0;
      for (int m = n; m <= big_n; ++m) slope += std::ldexp(family_.body(m).value(static_cast<std::size_t>(i)), -m * m);
      const double top = fixed + slope * breakpoint(n);
      if (a <= top) {
        t_hit = (a - fixed) / slope;
        break;
      }
      fixed += std::ldexp(family_.body(n).value(static_cast<std::size_t>(i)), n * n);
    }
    g = std::max(g, t_hit);
    if (!std::isfinite(g)) return kInf;
  }
  return g;
}

double KappaMap::default_cap() const { return std::ldexp(1.0, 2 * n_max() * n_max() + 2); }

double KappaMap::g_bisect(const Point& x, double t_cap) const {
  const Point origin = Point::Zero(x.size());
  if (x.norm() == 0.0) return 0.0;
  const auto inside = [&](double t) { return t > 0.0 && gauge_about(at(t), x, origin) <= 1.0; };
  if (!inside(t_cap)) throw Error(ErrorKind::CapExceeded, "point lies outside kappa(" + std::to_string(t_cap) + ")");
  double lo = 0.0, hi = t_cap;
  for (int i = 0; i < 400 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

// --- UniversalDensity ------------------------------------------------------

double planar_mass(const KappaMap& kappa) {
  if (kappa.family().dim() != 2) throw Error(ErrorKind::InvalidParameter, "planar_mass needs a planar family");
  const auto integrand = [&](double t) {
    return t <= 0.0 ? 0.0 : std::numbers::ln2 * std::exp2(-t) * area_2d(kappa.at(t));
  };
  std::vector<double> breaks;
  for (int n = 1; n <= kappa.n_max(); ++n) breaks.push_back(breakpoint(n));
  return quad::integrate_pieces(integrand, 0.0, 240.0, breaks, 1e-13);
}

UniversalDensity UniversalDensity::normalized(KappaMap kappa) {
  const double c = std::sqrt(planar_mass(kappa));
  return {std::move(kappa), c};
}

namespace {

DensityND make_universal(const KappaMap& kappa, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidParameter, "scale c must be positive");
  const int d = kappa.family().dim();
  const Point origin = Point::Zero(d);
  // For t <= 4 every coefficient is linear, so kappa(1) is the tangent cone
  // body of g at 0 and g(y) >= |y| / circumradius(kappa(1)).
  double r0 = circumradius_about(kappa.at(1.0), origin);
  if (d != 2) r0 /= 1.0 - kappa.family().net()->covering_radius();
  auto shared = std::make_shared<const KappaMap>(kappa);
  return DensityND::general(
      d, "universal", [shared, c](const Point& x) { return std::numbers::ln2 * shared->g(c * x); }, origin,
      Envelope{std::numbers::ln2 * c / r0, 0.0});
}

}  // namespace

UniversalDensity::UniversalDensity(KappaMap kappa, double c)
    : kappa_(std::move(kappa)), c_(c), density_(make_universal(kappa_, c_)) {}

double UniversalDensity::pdf(const Point& x) const { return std::exp2(-g_scaled(x)); }

// --- checks ----------------------------------------------------------------

double dominance_ratio(int n, int n_max) {
  if (n < 1 || n > n_max) throw Error(ErrorKind::OutOfFamily, "n is outside the family");
  const double t = breakpoint(n);
  double sum = 0.0;
  for (int j = 1; j <= n_max; ++j)
    if (j != n) sum += alpha(j, t);
  return sum / alpha(n, t);
}

double bm_density_check(const KappaMap& kappa, int n) {
  if (n < 1 || n > kappa.n_max()) throw Error(ErrorKind::OutOfFamily, "n is outside the family");
  const double t = breakpoint(n);
  const SupportBody body = kappa.at(t).scaled(1.0 / alpha(n, t));
  return bm_upper_homothetic(body, kappa.family().body(n)).value;
}

double level_set_identity_check(const UniversalDensity& f, int n) {
  if (n < 1) throw Error(ErrorKind::EmptyLevelSet, "the level set at 2^0 is the single point {0}");
  const LevelSetBody level = level_set_body(f.density(), f.kappa().family().net(), std::ldexp(1.0, -n));
  const SupportBody target = f.kappa().at(n).scaled(1.0 / f.c());
  return log_hausdorff(level.body.to_support(), target).value;
}

}  // namespace randpoly
