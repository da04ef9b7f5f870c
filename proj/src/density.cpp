#include "randpoly/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "randpoly/error.hpp"
#include "randpoly/optimize.hpp"
#include "randpoly/quadrature.hpp"

namespace randpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

/// Surface measure of the unit sphere S^k in R^{k+1}.
double sphere_area(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Bisection on a decreasing function for the root of fn(t) = target,
/// bracketed by doubling outward from `start` with initial step `step`.
template <class F>
double decreasing_root(F&& fn, double target, double start, double step, double rel_tol) {
  double lo = start, hi = start;
  if (fn(start) > target) {
    hi = start + step;
    while (fn(hi) > target) {
      lo = hi;
      step *= 2.0;
      hi = start + step;
      if (step > 1e12) throw Error(ErrorKind::ConstructionFailure, "quantile bracket diverged");
    }
  } else {
    lo = start - step;
    while (fn(lo) <= target) {
      hi = lo;
      step *= 2.0;
      lo = start - step;
      if (step > 1e12) throw Error(ErrorKind::ConstructionFailure, "quantile bracket diverged");
    }
  }
  const double tol = rel_tol * std::max({1.0, std::abs(lo), std::abs(hi)});
  return quad::bisect_first_true([&](double x) { return fn(x) <= target; }, lo, hi, tol);
}

}  // namespace

// --- Density1D -------------------------------------------------------------

Density1D::Density1D(Kind kind, double p, double a, double b) : kind_(kind), p_(p), a_(a), b_(b) {
  switch (kind_) {
    case Kind::Gaussian:
      c_ = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      hi_ = 9.5;
      lo_ = -hi_;
      break;
    case Kind::ExpPower: {
      if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidParameter, "exponential power needs p >= 1");
      const double half = quad::integrate([p](double s) { return std::exp(-std::pow(s, p)); }, 0.0, kInf, 1e-14);
      c_ = 0.5 / half;
      hi_ = std::pow(45.0, 1.0 / p);
      lo_ = -hi_;
      break;
    }
    case Kind::Uniform:
      if (!(a < b)) throw Error(ErrorKind::InvalidParameter, "uniform needs a < b");
      c_ = 1.0 / (b - a);
      lo_ = a;
      hi_ = b;
      break;
  }
}

Density1D Density1D::gaussian() { return {Kind::Gaussian, 2.0, 0.0, 0.0}; }
Density1D Density1D::exp_power(double p) { return {Kind::ExpPower, p, 0.0, 0.0}; }
Density1D Density1D::uniform(double a, double b) { return {Kind::Uniform, 1.0, a, b}; }

std::string Density1D::ref() const {
  switch (kind_) {
    case Kind::Gaussian:
      return "gaussian";
    case Kind::ExpPower:
      return "ep" + fmt("(%.17g)", p_);
    case Kind::Uniform:
      return "uniform" + fmt("(%.17g,", a_) + fmt("%.17g)", b_);
  }
  return "?";
}

double Density1D::g(double t) const {
  switch (kind_) {
    case Kind::Gaussian:
      return 0.5 * t * t - std::log(c_);
    case Kind::ExpPower:
      return std::pow(std::abs(t), p_) - std::log(c_);
    case Kind::Uniform:
      return (t >= a_ && t <= b_) ? -std::log(c_) : kInf;
  }
  return kInf;
}

double Density1D::pdf(double t) const { return std::exp(-g(t)); }

double Density1D::tail(double t) const {
  switch (kind_) {
    case Kind::Gaussian:
      return 0.5 * std::erfc(t / std::numbers::sqrt2);
    case Kind::ExpPower:
      if (t < 0.0) return 1.0 - tail(-t);
      return c_ / p_ * boost::math::tgamma(1.0 / p_, std::pow(t, p_));
    case Kind::Uniform:
      return std::clamp((b_ - t) / (b_ - a_), 0.0, 1.0);
  }
  return 0.0;
}

double Density1D::cdf(double t) const {
  if (kind_ == Kind::Uniform) return std::clamp((t - a_) / (b_ - a_), 0.0, 1.0);
  return tail(-t);
}

double Density1D::u(double t) const {
  const double s = tail(t);
  if (s > 0.0) return -std::log(s);
  switch (kind_) {
    case Kind::Gaussian:
      return 0.5 * t * t + std::log(t * std::sqrt(2.0 * std::numbers::pi));
    case Kind::ExpPower:
      return std::pow(t, p_) + (p_ - 1.0) * std::log(t) + std::log(p_ / c_);
    case Kind::Uniform:
      return kInf;
  }
  return kInf;
}

double Density1D::upper_quantile(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidParameter, "upper mass must lie in (0, 1)");
  if (kind_ == Kind::Uniform) return b_ - s * (b_ - a_);
  if (s > 0.5) return -upper_quantile(1.0 - s);
  if (s == 0.5) return 0.0;
  return decreasing_root([this](double t) { return tail(t); }, s, 0.0, 1.0, 1e-15);
}

double Density1D::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidParameter, "quantile level must lie in (0, 1)");
  if (kind_ == Kind::Uniform) return a_ + q * (b_ - a_);
  if (q < 0.5) return -upper_quantile(q);
  return upper_quantile(1.0 - q);
}

double Density1D::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Gaussian:
      return rng.normal();
    case Kind::ExpPower: {
      const double mag = std::pow(rng.gamma(1.0 / p_), 1.0 / p_);
      return rng.uniform() < 0.5 ? -mag : mag;
    }
    case Kind::Uniform:
      return a_ + (b_ - a_) * rng.uniform();
  }
  return 0.0;
}

std::vector<double> Density1D::breakpoints() const {
  if (kind_ == Kind::Uniform) return {a_, b_};
  return {0.0};
}

std::string to_string(TailBackend backend) {
  switch (backend) {
    case TailBackend::ClosedForm:
      return "closed-form";
    case TailBackend::RadialReduction:
      return "radial-reduction";
    case TailBackend::Quadrature:
      return "quadrature";
    case TailBackend::Cubature:
      return "cubature";
    case TailBackend::MonteCarlo:
      return "monte-carlo";
  }
  return "?";
}

// --- DensityND -------------------------------------------------------------

void DensityND::finish_ref(const std::string& ref) {
  ref_ = ref;
  id_ = stable_hash(ref_.data(), ref_.size());
}

DensityND DensityND::gaussian(int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidParameter, "dimension must be >= 1");
  DensityND d;
  d.klass_ = Class::Gaussian;
  d.dim_ = dim;
  d.mode_ = Point::Zero(dim);
  d.trunc_ = std::sqrt(80.0 + 2.0 * dim);
  d.finish_ref("gaussian:dim=" + std::to_string(dim));
  return d;
}

DensityND DensityND::schechtman_zinn(int dim, double p) {
  if (dim < 1) throw Error(ErrorKind::InvalidParameter, "dimension must be >= 1");
  DensityND d;
  d.klass_ = Class::SchechtmanZinn;
  d.dim_ = dim;
  d.p_ = p;
  d.factors_.assign(static_cast<std::size_t>(dim), Density1D::exp_power(p));
  d.mode_ = Point::Zero(dim);
  d.trunc_ = std::pow(40.0 + dim, 1.0 / p) * std::sqrt(static_cast<double>(dim));
  d.finish_ref("sz:dim=" + std::to_string(dim) + fmt(":p=%.17g", p));
  return d;
}

DensityND DensityND::radial(int dim, std::string name, std::function<double(double)> psi, double scale_hint) {
  if (dim < 1) throw Error(ErrorKind::InvalidParameter, "dimension must be >= 1");
  DensityND d;
  d.klass_ = Class::Radial;
  d.dim_ = dim;
  d.psi_ = std::move(psi);
  d.mode_ = Point::Zero(dim);
  const double psi0 = d.psi_(0.0);
  double r = std::max(scale_hint, 1e-3);
  while (d.psi_(r) - psi0 - (dim - 1) * std::log(std::max(r, 1.0)) < 60.0) {
    r *= 1.5;
    if (r > 1e8) throw Error(ErrorKind::InvalidParameter, "radial profile does not decay");
  }
  d.trunc_ = r;
  const int k = dim - 1;
  const double mass =
      sphere_area(k) * quad::integrate([&](double s) { return std::pow(s, k) * std::exp(psi0 - d.psi_(s)); }, 0.0, r,
                                       1e-14);
  d.c_ = std::exp(psi0) / mass;
  d.finish_ref("radial:" + name + ":dim=" + std::to_string(dim));
  return d;
}

DensityND DensityND::radial_gaussian(int dim) {
  return radial(dim, "gaussian", [](double r) { return 0.5 * r * r; }, 4.0);
}

DensityND DensityND::radial_exp_power(int dim, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidParameter, "exponential power needs p >= 1");
  return radial(dim, fmt("ep(%.17g)", p), [p](double r) { return std::pow(r, p); }, 2.0);
}

DensityND DensityND::product(std::vector<Density1D> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidParameter, "product needs at least one factor");
  DensityND d;
  d.klass_ = Class::Product;
  d.dim_ = static_cast<int>(factors.size());
  d.mode_ = Point::Zero(d.dim_);
  std::string ref = "product:";
  double r2 = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (f.kind() == Density1D::Kind::Uniform) d.mode_[static_cast<Eigen::Index>(i)] = 0.5 * (f.lower_bound() + f.upper_bound());
    r2 += std::pow(std::max(std::abs(f.lower_bound()), std::abs(f.upper_bound())), 2);
    ref += (i ? "," : "") + f.ref();
  }
  d.trunc_ = std::sqrt(r2);
  d.factors_ = std::move(factors);
  d.finish_ref(ref);
  return d;
}

DensityND DensityND::uniform_polygon(planar::Polygon polygon) {
  if (!planar::is_convex_ccw(polygon)) throw Error(ErrorKind::InvalidPolygon, "polygon must be convex and counter-clockwise");
  DensityND d;
  d.klass_ = Class::UniformPolygon;
  d.dim_ = 2;
  const planar::Vec2 c = planar::centroid(polygon);
  d.mode_ = Point(2);
  d.mode_ << c.x(), c.y();
  std::string ref = "uniform-polygon:";
  for (const auto& v : polygon) {
    ref += fmt("(%.17g,", v.x()) + fmt("%.17g)", v.y());
    d.trunc_ = std::max(d.trunc_, (v - c).norm());
  }
  d.c_ = 1.0 / planar::signed_area(polygon);
  d.polygon_ = std::move(polygon);
  d.finish_ref(ref);
  return d;
}

DensityND DensityND::general(int dim, std::string name, std::function<double(const Point&)> g, const Point& start,
                             Envelope envelope) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::UnsupportedDensity, "general densities are limited to dim <= 3");
  if (start.size() != dim) throw Error(ErrorKind::InvalidParameter, "start point has the wrong dimension");
  if (!(envelope.m > 0.0)) throw Error(ErrorKind::InvalidParameter, "envelope slope must be positive");
  if (!std::isfinite(g(start))) throw Error(ErrorKind::InvalidParameter, "g must be finite at the start point");
  DensityND d;
  d.klass_ = Class::General;
  d.dim_ = dim;
  d.g_ = std::move(g);
  d.envelope_ = envelope;
  double best = 0.0;
  Point x = nelder_mead(d.g_, start, 0.5, 2000, best);
  x = nelder_mead(d.g_, x, 0.05, 1000, best);
  d.mode_ = x;
  d.trunc_ = (40.0 + best + envelope.c0) / envelope.m;
  d.finish_ref("general:" + name + ":dim=" + std::to_string(dim));
  return d;
}

Point DensityND::centroid() const { return mode_; }

double DensityND::g(const Point& x) const {
  if (x.size() != dim_) throw Error(ErrorKind::InvalidParameter, "point has the wrong dimension");
  switch (klass_) {
    case Class::Gaussian:
      return 0.5 * x.squaredNorm() + 0.5 * dim_ * std::log(2.0 * std::numbers::pi);
    case Class::SchechtmanZinn:
    case Class::Product: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += factors_[static_cast<std::size_t>(i)].g(x[i]);
      return s;
    }
    case Class::Radial:
      return psi_(x.norm()) - std::log(c_);
    case Class::UniformPolygon: {
      for (std::size_t i = 0; i < polygon_.size(); ++i)
        if (planar::cross(polygon_[i], polygon_[(i + 1) % polygon_.size()], planar::Vec2(x[0], x[1])) < 0.0) return kInf;
      return -std::log(c_);
    }
    case Class::General:
      return g_(x);
  }
  return kInf;
}

double DensityND::pdf(const Point& x) const { return std::exp(-g(x)); }

// --- tails -----------------------------------------------------------------

namespace {

void check_direction(const DensityND& d, const Eigen::VectorXd& theta) {
  if (theta.size() != d.dim()) throw Error(ErrorKind::InvalidParameter, "direction has the wrong dimension");
  if (std::abs(theta.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidParameter, "direction must be a unit vector");
}

/// Index of the single non-zero coordinate of an axis direction, or -1.
int axis_of(const Eigen::VectorXd& theta) {
  int axis = -1;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (theta[i] == 0.0) continue;
    if (axis >= 0) return -1;
    axis = static_cast<int>(i);
  }
  return axis;
}

/// P(X >= t) for one factor scaled by w != 0, i.e. P(w X >= t).
double scaled_tail(const Density1D& f, double w, double t) { return w > 0.0 ? f.tail(t / w) : f.cdf(t / w); }

struct Term {
  const Density1D* f;
  double w;
};

/// P(sum w_i X_i >= t) by nested quadrature: the outermost integral runs
/// over the term with the smallest weight, the innermost is closed form.
double product_tail(const std::vector<Term>& terms, std::size_t first, double t, double rel_tol) {
  const Term& term = terms[first];
  if (first + 1 == terms.size()) return scaled_tail(*term.f, term.w, t);
  const auto integrand = [&](double x) {
    return term.f->pdf(x) * product_tail(terms, first + 1, t - term.w * x, rel_tol);
  };
  return quad::integrate_pieces<61>(integrand, term.f->lower_bound(), term.f->upper_bound(), term.f->breakpoints(),
                                rel_tol, 15);
}

/// Density of sum w_i X_i at t.
double product_marginal(const std::vector<Term>& terms, std::size_t first, double t, double rel_tol) {
  const Term& term = terms[first];
  if (first + 1 == terms.size()) return term.f->pdf(t / term.w) / std::abs(term.w);
  const auto integrand = [&](double x) {
    return term.f->pdf(x) * product_marginal(terms, first + 1, t - term.w * x, rel_tol);
  };
  std::vector<double> breaks = term.f->breakpoints();
  // Kinks of the innermost density at w_last x_last = const show up here too.
  const Term& last = terms.back();
  if (first + 2 == terms.size())
    for (double b : last.f->breakpoints()) breaks.push_back((t - last.w * b) / term.w);
  return quad::integrate_pieces<61>(integrand, term.f->lower_bound(), term.f->upper_bound(), breaks, rel_tol, 15);
}

std::vector<Term> product_terms(const DensityND& d, const Eigen::VectorXd& theta) {
  std::vector<Term> terms;
  for (int i = 0; i < d.dim(); ++i)
    if (theta[i] != 0.0) terms.push_back({&d.factors()[static_cast<std::size_t>(i)], theta[i]});
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return std::abs(a.w) < std::abs(b.w); });
  return terms;
}

/// Upper integration limit for radial integrals starting at `from`.
double radial_limit(const DensityND& d, double from) {
  const double base = d.psi(from);
  double r = std::max(from, 1e-3) + std::max(d.truncation_radius() * 0.25, 1e-3);
  while (d.psi(r) - base - (d.dim() - 1) * std::log(std::max(r / std::max(from, 1.0), 1.0)) < 60.0) r *= 1.5;
  return r;
}

double radial_tail_upper(const DensityND& d, double t) {
  const int dim = d.dim();
  const double c = d.radial_normalizer();
  const double hi = radial_limit(d, t);
  if (dim == 1) return c * quad::integrate([&](double r) { return std::exp(-d.psi(r)); }, t, hi, 1e-12);
  const double area = sphere_area(dim - 1);
  const double shape = 0.5 * (dim - 1);
  const auto integrand = [&](double r) {
    const double ratio = t / r;
    const double cap = 0.5 * boost::math::ibetac(0.5, shape, std::min(ratio * ratio, 1.0));
    return std::pow(r, dim - 1) * std::exp(-d.psi(r)) * cap;
  };
  return c * area * quad::integrate(integrand, t, hi, 1e-12);
}

double radial_marginal(const DensityND& d, double s) {
  const int dim = d.dim();
  const double c = d.radial_normalizer();
  s = std::abs(s);
  if (dim == 1) return c * std::exp(-d.psi(s));
  const double hi = radial_limit(d, s);
  const auto integrand = [&](double rho) { return std::pow(rho, dim - 2) * std::exp(-d.psi(std::hypot(s, rho))); };
  return c * sphere_area(dim - 2) * quad::integrate(integrand, 0.0, hi, 1e-12);
}

/// Orthonormal complement of theta (columns).
Eigen::MatrixXd complement(const Eigen::VectorXd& theta) {
  const Eigen::Index d = theta.size();
  Eigen::MatrixXd basis(d, d - 1);
  Eigen::Index filled = 0;
  for (Eigen::Index k = 0; k < d && filled < d - 1; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d, k);
    v -= v.dot(theta) * theta;
    for (Eigen::Index j = 0; j < filled; ++j) v -= v.dot(basis.col(j)) * basis.col(j);
    if (v.norm() < 0.3) continue;
    basis.col(filled++) = v.normalized();
  }
  return basis;
}

/// Integral of f over the hyperplane {<x, theta> = s} for general densities.
double general_marginal(const DensityND& d, const Eigen::VectorXd& theta, const Eigen::MatrixXd& perp, double s,
                        double rel_tol) {
  const double r = d.truncation_radius();
  const Eigen::VectorXd mode_perp = perp.transpose() * d.mode();
  const Eigen::VectorXd base = s * theta;
  if (d.dim() == 1) return d.pdf(base);
  if (d.dim() == 2) {
    const auto inner = [&](double y) { return d.pdf(base + y * perp.col(0)); };
    return quad::integrate(inner, mode_perp[0] - r, mode_perp[0] + r, rel_tol, 12);
  }
  const auto outer = [&](double y0) {
    const auto inner = [&](double y1) { return d.pdf(base + y0 * perp.col(0) + y1 * perp.col(1)); };
    return quad::integrate(inner, mode_perp[1] - r, mode_perp[1] + r, rel_tol, 10);
  };
  return quad::integrate(outer, mode_perp[0] - r, mode_perp[0] + r, rel_tol, 10);
}

double general_tail(const DensityND& d, const Eigen::VectorXd& theta, double t) {
  const Eigen::MatrixXd perp = complement(theta);
  const double m = theta.dot(d.mode());
  const double r = d.truncation_radius();
  const double tol = d.dim() == 3 ? 1e-7 : 1e-10;
  const auto marginal = [&](double s) { return general_marginal(d, theta, perp, s, tol); };
  if (t >= m) return t >= m + r ? 0.0 : quad::integrate(marginal, t, m + r, tol, 12);
  if (t <= m - r) return 1.0;
  return 1.0 - quad::integrate(marginal, m - r, t, tol, 12);
}

/// Uniform draws from the polygon by bounding-box rejection.
Eigen::Matrix2Xd polygon_points(const planar::Polygon& poly, std::size_t n, std::uint64_t seed) {
  planar::Vec2 lo = poly.front(), hi = poly.front();
  for (const auto& v : poly) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  Rng rng(seed);
  Eigen::Matrix2Xd out(2, static_cast<Eigen::Index>(n));
  std::size_t filled = 0;
  while (filled < n) {
    const planar::Vec2 x(lo.x() + (hi.x() - lo.x()) * rng.uniform(), lo.y() + (hi.y() - lo.y()) * rng.uniform());
    bool inside = true;
    for (std::size_t i = 0; i < poly.size() && inside; ++i)
      inside = planar::cross(poly[i], poly[(i + 1) % poly.size()], x) >= 0.0;
    if (inside) out.col(static_cast<Eigen::Index>(filled++)) = x;
  }
  return out;
}

/// Projections <x_i, theta> of a fresh Monte Carlo sample.
Eigen::VectorXd mc_projections(const DensityND& d, const Eigen::VectorXd& theta, EvalContext* ctx) {
  EvalContext local;
  EvalContext& c = ctx ? *ctx : local;
  const std::uint64_t seed =
      derive_stream(derive_stream(d.id(), stable_hash(theta.data(), sizeof(double) * static_cast<std::size_t>(theta.size()))),
                    c.counter++);
  const std::size_t n = c.mc_samples;
  if (d.klass() == DensityND::Class::UniformPolygon) return polygon_points(d.polygon(), n, seed).transpose() * theta;
  if (d.klass() == DensityND::Class::Product || d.klass() == DensityND::Class::SchechtmanZinn) {
    Rng rng(seed);
    Eigen::VectorXd proj(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < d.dim(); ++k) s += theta[k] * d.factors()[static_cast<std::size_t>(k)].sample(rng);
      proj[static_cast<Eigen::Index>(i)] = s;
    }
    return proj;
  }
  throw Error(ErrorKind::UnsupportedDensity, "no Monte Carlo backend for " + d.ref());
}

bool uses_monte_carlo(const DensityND& d, const Eigen::VectorXd& theta) {
  switch (d.klass()) {
    case DensityND::Class::UniformPolygon:
      return true;
    case DensityND::Class::Product:
    case DensityND::Class::SchechtmanZinn:
      return axis_of(theta) < 0 && d.dim() > 3;
    default:
      return false;
  }
}

}  // namespace

TailEstimate tail_estimate(const DensityND& d, const Eigen::VectorXd& theta, double t, EvalContext* ctx) {
  check_direction(d, theta);
  if (uses_monte_carlo(d, theta)) {
    const Eigen::VectorXd proj = mc_projections(d, theta, ctx);
    const double n = static_cast<double>(proj.size());
    const double v = static_cast<double>((proj.array() >= t).count()) / n;
    return {v, kZ99 * std::sqrt(std::max(v * (1.0 - v), 1.0 / n) / n), TailBackend::MonteCarlo};
  }
  switch (d.klass()) {
    case DensityND::Class::Gaussian: {
      static const Density1D phi = Density1D::gaussian();
      return {phi.tail(t), 0.0, TailBackend::ClosedForm};
    }
    case DensityND::Class::SchechtmanZinn:
    case DensityND::Class::Product: {
      const int axis = axis_of(theta);
      if (axis >= 0)
        return {scaled_tail(d.factors()[static_cast<std::size_t>(axis)], theta[axis], t), 0.0, TailBackend::ClosedForm};
      return {product_tail(product_terms(d, theta), 0, t, 1e-11), 0.0, TailBackend::Quadrature};
    }
    case DensityND::Class::Radial: {
      const double v = t >= 0.0 ? radial_tail_upper(d, t) : 1.0 - radial_tail_upper(d, -t);
      return {v, 0.0, TailBackend::RadialReduction};
    }
    case DensityND::Class::General:
      return {general_tail(d, theta, t), 0.0, TailBackend::Cubature};
    case DensityND::Class::UniformPolygon:
      break;
  }
  throw Error(ErrorKind::UnsupportedDensity, "no tail backend for " + d.ref());
}

QuantileEstimate upper_quantile_estimate(const DensityND& d, const Eigen::VectorXd& theta, double s, EvalContext* ctx) {
  check_direction(d, theta);
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidParameter, "quantile level must lie in (0, 1)");
  if (uses_monte_carlo(d, theta)) {
    Eigen::VectorXd proj = mc_projections(d, theta, ctx);
    std::sort(proj.data(), proj.data() + proj.size());
    const double n = static_cast<double>(proj.size());
    const double q = 1.0 - s;
    const double half = kZ99 * std::sqrt(n * q * s);
    const auto at = [&](double rank) {
      const auto i = static_cast<Eigen::Index>(std::clamp(std::ceil(rank) - 1.0, 0.0, n - 1.0));
      return proj[i];
    };
    return {at(q * n), at(q * n - half), at(q * n + half + 1.0), TailBackend::MonteCarlo};
  }
  if (d.klass() == DensityND::Class::Gaussian) {
    static const Density1D phi = Density1D::gaussian();
    const double v = phi.upper_quantile(s);
    return {v, v, v, TailBackend::ClosedForm};
  }
  if (d.klass() == DensityND::Class::Product || d.klass() == DensityND::Class::SchechtmanZinn) {
    const int axis = axis_of(theta);
    if (axis >= 0) {
      const auto& f = d.factors()[static_cast<std::size_t>(axis)];
      const double v = theta[axis] > 0.0 ? f.upper_quantile(s) : -f.upper_quantile(1.0 - s);
      return {v, v, v, TailBackend::ClosedForm};
    }
  }
  TailBackend backend = TailBackend::ClosedForm;
  const auto fn = [&](double t) {
    const TailEstimate e = tail_estimate(d, theta, t, ctx);
    backend = e.backend;
    return e.value;
  };
  const double start = theta.dot(d.centroid());
  const double step = std::max(0.25, 0.1 * d.truncation_radius());
  const double v = decreasing_root(fn, s, start, step, 1e-13);
  return {v, v, v, backend};
}

QuantileEstimate quantile_estimate(const DensityND& d, const Eigen::VectorXd& theta, double q, EvalContext* ctx) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidParameter, "quantile level must lie in (0, 1)");
  return upper_quantile_estimate(d, theta, 1.0 - q, ctx);
}

double radon(const DensityND& d, const Eigen::VectorXd& theta, double t) {
  check_direction(d, theta);
  switch (d.klass()) {
    case DensityND::Class::Gaussian: {
      static const Density1D phi = Density1D::gaussian();
      return phi.pdf(t);
    }
    case DensityND::Class::SchechtmanZinn:
    case DensityND::Class::Product:
      if (d.dim() > 3 && axis_of(theta) < 0) break;
      return product_marginal(product_terms(d, theta), 0, t, 1e-11);
    case DensityND::Class::Radial:
      return radial_marginal(d, t);
    case DensityND::Class::UniformPolygon: {
      // Chord length of the polygon along the line, over the area.
      const auto& poly = d.polygon();
      const planar::Vec2 n(theta[0], theta[1]);
      const planar::Vec2 along(-theta[1], theta[0]);
      double lo = kInf, hi = -kInf;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const planar::Vec2& a = poly[i];
        const planar::Vec2& b = poly[(i + 1) % poly.size()];
        const double fa = n.dot(a) - t, fb = n.dot(b) - t;
        if ((fa > 0.0) == (fb > 0.0) && fa != 0.0 && fb != 0.0) continue;
        if (fa == fb) continue;
        const planar::Vec2 x = a + (b - a) * (fa / (fa - fb));
        lo = std::min(lo, along.dot(x));
        hi = std::max(hi, along.dot(x));
      }
      return hi > lo ? (hi - lo) * d.radial_normalizer() : 0.0;
    }
    case DensityND::Class::General:
      return general_marginal(d, theta, complement(theta), t, 1e-10);
  }
  throw Error(ErrorKind::UnsupportedDensity, "no marginal backend for " + d.ref());
}

// --- 1-D extreme-value helpers --------------------------------------------

MaxInterval max_concentration_interval(const Density1D& density, long long n, double q) {
  if (n < 3) throw Error(ErrorKind::InvalidParameter, "n must be >= 3");
  if (!(q > 0.0)) throw Error(ErrorKind::InvalidParameter, "q must be positive");
  const double nn = static_cast<double>(n);
  MaxInterval r;
  r.a = std::pow(std::log(nn), -q);
  r.b = q * std::log(nn);
  if (r.a >= 1.0 || r.b >= nn) throw Error(ErrorKind::ParameterRegime, "n is too small for this q");
  r.lo = density.upper_quantile(r.b / nn);
  r.hi = density.upper_quantile(r.a / nn);
  r.prob = std::exp(nn * std::log1p(-r.a / nn)) - std::exp(nn * std::log1p(-r.b / nn));
  r.prob_floor = 1.0 - r.a - std::exp(-r.b);
  return r;
}

TailBracket tail_bracket(double p, double t) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidParameter, "p must be >= 1");
  if (!(t >= 1.0)) throw Error(ErrorKind::OutOfDomain, "the bracket is only established for t >= 1");
  const double core = std::pow(t, 1.0 - p) * std::exp(-std::pow(t, p));
  return {core / (2.0 * p - 1.0), core / p};
}

double u_convexity_report(const Density1D& density, const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw Error(ErrorKind::InvalidParameter, "grid must be increasing");
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = density.u(grid[i]);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double hl = grid[i] - grid[i - 1], hr = grid[i + 1] - grid[i];
    if (!(hl > 0.0 && hr > 0.0) || !std::isfinite(u[i + 1])) continue;
    const double jump = (u[i + 1] - u[i]) / hr - (u[i] - u[i - 1]) / hl;
    worst = std::max(worst, -jump * 0.5 * (hl + hr));
  }
  return worst;
}

Eigen::VectorXd unit_vector(int dim, int i) { return Eigen::VectorXd::Unit(dim, i); }

}  // namespace randpoly
