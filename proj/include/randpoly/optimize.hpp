#pragma once

#include <functional>

#include <Eigen/Core>

namespace randpoly {

/// Downhill simplex (reflection 1, expansion 2, contraction and shrink 1/2)
/// from an axis-aligned simplex of edge `step` at x0. The objective may
/// return +inf for infeasible points. Returns the best vertex; its value is
/// written to `best`.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                            double step, int max_evals, double& best);

}  // namespace randpoly
