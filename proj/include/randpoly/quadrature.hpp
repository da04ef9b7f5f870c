#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace randpoly::quad {

/// Adaptive 15-point Gauss-Kronrod on [a, b] (either end may be infinite).
/// `rel_tol` is relative to the L1 norm of the integrand, which keeps tiny
/// tail probabilities accurate in relative terms.
template <unsigned Points = 15, class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 18) {
  if (!(a < b)) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, Points>::integrate(
      f, a, b, max_depth, rel_tol, &error);
}

/// Integrates over [a, b] split at the given interior breakpoints, so that
/// kinks of the integrand land on panel boundaries.
template <unsigned Points = 15, class F>
double integrate_pieces(F&& f, double a, double b, std::vector<double> breaks,
                        double rel_tol = 1e-12, unsigned max_depth = 18) {
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double x) { return !(x > a && x < b) || !std::isfinite(x); }),
               breaks.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  double lo = a;
  for (double x : breaks) {
    total += integrate<Points>(f, lo, x, rel_tol, max_depth);
    lo = x;
  }
  total += integrate<Points>(f, lo, b, rel_tol, max_depth);
  return total;
}

/// Bisection for an increasing predicate: returns the smallest x in [lo, hi]
/// (to `tol`) with pred(x) true. pred(hi) must be true.
template <class Pred>
double bisect_first_true(Pred&& pred, double lo, double hi, double tol, int max_iter = 200) {
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace randpoly::quad
