#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "randpoly/hull2d.hpp"
#include "randpoly/rng.hpp"

namespace randpoly {

using Point = Eigen::VectorXd;

/// 1-D log-concave density f = exp(-g).
class Density1D {
 public:
  enum class Kind { Gaussian, ExpPower, Uniform };

  static Density1D gaussian();
  /// Density proportional to exp(-|t|^p), p >= 1, normalised by quadrature.
  static Density1D exp_power(double p);
  static Density1D uniform(double a, double b);

  Kind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  /// Normalising constant c in f = c exp(-|t|^p) (1/sqrt(2 pi) for the Gaussian).
  double normalizer() const noexcept { return c_; }
  std::string ref() const;

  double pdf(double t) const;
  double g(double t) const;
  double cdf(double t) const;
  /// 1 - cdf(t) without cancellation.
  double tail(double t) const;
  /// u(t) = -log(1 - J(t)); finite far into the upper tail.
  double u(double t) const;
  /// J^{-1}(q) by doubling bracket and bisection.
  double quantile(double q) const;
  /// t with tail(t) = s; accurate for tiny s where 1 - s rounds to 1.
  double upper_quantile(double s) const;
  double sample(Rng& rng) const;

  /// Interval outside which the mass is below 1e-18 (the support for the
  /// uniform kind).
  double lower_bound() const noexcept { return lo_; }
  double upper_bound() const noexcept { return hi_; }
  /// Points where the density has a kink.
  std::vector<double> breakpoints() const;

 private:
  Density1D(Kind kind, double p, double a, double b);

  Kind kind_;
  double p_ = 2.0;
  double a_ = 0.0, b_ = 1.0;
  double c_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
};

enum class TailBackend { ClosedForm, RadialReduction, Quadrature, Cubature, MonteCarlo };
std::string to_string(TailBackend backend);

struct TailEstimate {
  double value = 0.0;
  double ci = 0.0;  // half-width of the 99% interval; 0 for deterministic backends
  TailBackend backend = TailBackend::ClosedForm;
};

struct QuantileEstimate {
  double value = 0.0;
  double lo = 0.0;  // 99% interval (equal to value for deterministic backends)
  double hi = 0.0;
  TailBackend backend = TailBackend::ClosedForm;
};

/// Per-thread evaluation state. The Monte Carlo backend draws stream
/// (density, theta, counter) and bumps the counter, so a fixed call
/// sequence is reproducible.
struct EvalContext {
  std::uint64_t counter = 0;
  std::size_t mc_samples = 1'000'000;
};

/// Lower bound g(x) >= m |x - mode| - c0 used for truncation and rejection.
struct Envelope {
  double m = 1.0;
  double c0 = 0.0;
};

/// d-dimensional log-concave density. Built-ins have their mode and
/// centroid at the origin.
class DensityND {
 public:
  enum class Class { Gaussian, SchechtmanZinn, Radial, Product, UniformPolygon, General };

  /// Standard Gaussian with closed-form marginals.
  static DensityND gaussian(int dim);
  /// c^d exp(-||x||_p^p): i.i.d. EP(p) coordinates.
  static DensityND schechtman_zinn(int dim, double p);
  /// f(x) = c exp(-psi(|x|)) with psi convex increasing, c by quadrature.
  static DensityND radial(int dim, std::string name, std::function<double(double)> psi, double scale_hint = 1.0);
  static DensityND radial_gaussian(int dim);
  static DensityND radial_exp_power(int dim, double p);
  static DensityND product(std::vector<Density1D> factors);
  /// Uniform measure on a convex polygon (tails by Monte Carlo).
  static DensityND uniform_polygon(planar::Polygon polygon);
  /// f = exp(-g) for a caller-supplied convex g (assumed normalised),
  /// dim <= 3. The mode is found by downhill search from `start`.
  static DensityND general(int dim, std::string name, std::function<double(const Point&)> g, const Point& start,
                           Envelope envelope);

  Class klass() const noexcept { return klass_; }
  int dim() const noexcept { return dim_; }
  const std::string& ref() const noexcept { return ref_; }
  std::uint64_t id() const noexcept { return id_; }
  const Point& mode() const noexcept { return mode_; }
  /// Origin for built-ins, polygon centroid for the uniform class, the
  /// mode for general densities.
  Point centroid() const;

  double g(const Point& x) const;
  double pdf(const Point& x) const;
  double mode_value() const { return pdf(mode_); }

  double p() const noexcept { return p_; }
  const std::vector<Density1D>& factors() const noexcept { return factors_; }
  const planar::Polygon& polygon() const noexcept { return polygon_; }
  double radial_normalizer() const noexcept { return c_; }
  double psi(double r) const { return psi_(r); }
  const Envelope& envelope() const noexcept { return envelope_; }
  /// Radius about the mode beyond which the density is negligible (< e^-40 f(mode)).
  double truncation_radius() const noexcept { return trunc_; }

 private:
  DensityND() = default;
  void finish_ref(const std::string& ref);

  Class klass_ = Class::Gaussian;
  int dim_ = 1;
  std::string ref_;
  std::uint64_t id_ = 0;
  Point mode_;
  double p_ = 2.0;
  std::vector<Density1D> factors_;
  planar::Polygon polygon_;
  std::function<double(double)> psi_;
  double c_ = 1.0;
  std::function<double(const Point&)> g_;
  Envelope envelope_;
  double trunc_ = 0.0;
};

/// mu{x : <x, theta> >= t}. Throws unsupported-density for combinations
/// without a backend.
TailEstimate tail_estimate(const DensityND& density, const Eigen::VectorXd& theta, double t,
                           EvalContext* ctx = nullptr);
inline double tail(const DensityND& density, const Eigen::VectorXd& theta, double t, EvalContext* ctx = nullptr) {
  return tail_estimate(density, theta, t, ctx).value;
}

/// t with tail(theta, t) = 1 - q.
QuantileEstimate quantile_estimate(const DensityND& density, const Eigen::VectorXd& theta, double q,
                                   EvalContext* ctx = nullptr);
inline double quantile(const DensityND& density, const Eigen::VectorXd& theta, double q, EvalContext* ctx = nullptr) {
  return quantile_estimate(density, theta, q, ctx).value;
}
/// Same root, parameterised by the upper mass s = 1 - q (keeps tiny s exact).
QuantileEstimate upper_quantile_estimate(const DensityND& density, const Eigen::VectorXd& theta, double s,
                                         EvalContext* ctx = nullptr);

/// Hyperplane integral of f over {<x, theta> = t}, i.e. the marginal
/// density of <X, theta> at t, from each backend's direct formula.
double radon(const DensityND& density, const Eigen::VectorXd& theta, double t);

/// Where the maximum of n i.i.d. draws concentrates: with a = (log n)^-q
/// and b = q log n, [lo, hi] = [J^-1(1 - b/n), J^-1(1 - a/n)] holds the
/// maximum with probability prob = (1 - a/n)^n - (1 - b/n)^n.
struct MaxInterval {
  double a = 0.0, b = 0.0;
  double lo = 0.0, hi = 0.0;
  double prob = 0.0;
  double prob_floor = 0.0;  // 1 - a - e^{-b}
};
MaxInterval max_concentration_interval(const Density1D& density, long long n, double q);

struct TailBracket {
  double lo = 0.0, hi = 0.0;
};
/// Bounds on the integral of exp(-s^p) over [t, inf), valid for t >= 1.
TailBracket tail_bracket(double p, double t);

/// max over interior grid points of -(second difference of u), the
/// non-uniform grid version scaling slope jumps by the mean spacing.
double u_convexity_report(const Density1D& density, const std::vector<double>& grid);

/// Unit vector e_i of the given dimension.
Eigen::VectorXd unit_vector(int dim, int i);

}  // namespace randpoly
