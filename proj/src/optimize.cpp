#include "randpoly/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace randpoly {

Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                            double step, int max_evals, double& best) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> fv(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)][i] += step;
  int evals = 0;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    fv[i] = f(simplex[i]);
    ++evals;
  }
  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t lo = order.front(), hi = order.back(), second = order[order.size() - 2];
    double size = 0.0;
    for (const auto& p : simplex) size = std::max(size, (p - simplex[lo]).norm());
    if (std::isfinite(fv[hi]) && (fv[hi] - fv[lo] <= 1e-13 * (1.0 + std::abs(fv[lo])) || size < 1e-11 * (1.0 + step)))
      break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != hi) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
    const double fr = f(reflected);
    ++evals;
    if (fr < fv[lo]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[hi]);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex[hi] = expanded;
        fv[hi] = fe;
      } else {
        simplex[hi] = reflected;
        fv[hi] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[hi] = reflected;
      fv[hi] = fr;
    } else {
      const Eigen::VectorXd contracted = fr < fv[hi] ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                                           : Eigen::VectorXd(centroid + 0.5 * (simplex[hi] - centroid));
      const double fc = f(contracted);
      ++evals;
      if (fc < std::min(fr, fv[hi])) {
        simplex[hi] = contracted;
        fv[hi] = fc;
      } else {
        for (std::size_t i = 0; i < simplex.size(); ++i) {
          if (i == lo) continue;
          simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
          fv[i] = f(simplex[i]);
          ++evals;
        }
      }
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  best = *it;
  return simplex[static_cast<std::size_t>(it - fv.begin())];
}

}  // namespace randpoly
