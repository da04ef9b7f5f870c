// Independent reference computations for the tests. Nothing here calls the
// code under test for the quantity being checked.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Core>

#include "randpoly/convex_body.hpp"
#include "randpoly/error.hpp"

namespace oracle {

inline double normal_upper_quantile(double s) {
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), s));
}

inline double normal_tail(double t) { return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), t)); }

inline double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }

/// Integral of exp(-s^p) over [t, inf) by double-exponential quadrature.
inline double exp_power_tail(double p, double t) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([p, t](double u) { return std::exp(-std::pow(t + u, p)); }, 0.0,
                              std::numeric_limits<double>::infinity(), 1e-14);
}

/// Integral of f over [a, b] by tanh-sinh.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, tol);
}

/// Brute-force minimum of log_hausdorff_about over a square grid of centers.
struct GridResult {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd at;
};
inline GridResult grid_log_hausdorff(const randpoly::SupportBody& k, const randpoly::SupportBody& l, double x0, double x1,
                                     double y0, double y1, int steps) {
  GridResult best;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      Eigen::VectorXd x(2);
      x << x0 + (x1 - x0) * i / steps, y0 + (y1 - y0) * j / steps;
      try {
        const double v = randpoly::log_hausdorff_about(k, l, x);
        if (v < best.value) {
          best.value = v;
          best.at = x;
        }
      } catch (const randpoly::Error&) {
      }
    }
  return best;
}

/// Support value of a planar polygon (vertex list) in direction w.
inline double polygon_support(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& w) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : poly) h = std::max(h, v.dot(w));
  return h;
}

}  // namespace oracle
