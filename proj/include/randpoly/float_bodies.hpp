#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randpoly/convex_body.hpp"
#include "randpoly/density.hpp"

namespace randpoly {

/// Net over-approximation of the floating body: the intersection over net
/// directions w of {<x, w> <= q_w} where mu{<x, w> >= q_w} = delta. The
/// support values are stored about the density centroid.
struct FloatingPolytope {
  SupportBody body;
  double delta = 0.0;
  std::string density_ref;
  /// Per-direction 99% quantile intervals (degenerate unless Monte Carlo).
  std::vector<QuantileEstimate> quantiles;
  /// Largest quantile interval half-width over the net.
  double max_ci = 0.0;
};

/// Refuses delta >= 1/e with possibly-empty.
FloatingPolytope floating_polytope(const DensityND& density, NetPtr net, double delta, EvalContext* ctx = nullptr);

/// Super-level set {f >= delta} as radial values about the mode.
struct LevelSetBody {
  RadialBody body;
  double delta = 0.0;
  std::string density_ref;
};
LevelSetBody level_set_body(const DensityND& density, NetPtr net, double delta);

/// Slab intersection {x : <x - mode, w> <= t_w} with t_w the largest root of
/// radon(w, t) = delta beyond the mode.
struct RadonBody {
  SupportBody body;
  double delta = 0.0;
  std::string density_ref;
};
RadonBody radon_body(const DensityND& density, NetPtr net, double delta);

/// Convex floating body of a planar convex polygon: per net direction the
/// cap {<x, w> >= t} has area lambda * area(K). Values about the centroid.
SupportBody convex_floating_body_2d(const planar::Polygon& polygon, double lambda, NetPtr net);

/// Cap area of the polygon beyond {<x, w> >= t}.
double cap_area(const planar::Polygon& polygon, const planar::Vec2& w, double t);

struct ZetaEstimate {
  double estimate = 0.0;
  double ci = 0.0;  // 99% half-width
  std::size_t samples = 0;
};

/// Monte Carlo estimate of mu{f < epsilon}.
ZetaEstimate zeta(const DensityND& density, double epsilon, std::size_t samples, std::uint64_t seed);

/// JSON of a constructed body with {delta, density_ref} metadata.
std::string to_json(const FloatingPolytope& body);
std::string to_json(const LevelSetBody& body);
std::string to_json(const RadonBody& body);

}  // namespace randpoly
