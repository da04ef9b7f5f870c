#pragma once

#include <string>
#include <vector>

#include "randpoly/convex_body.hpp"
#include "randpoly/density.hpp"

namespace randpoly {

/// alpha_n(t) = 2^{-n^2} t for t <= 2^{2n^2}, else 2^{n^2}.
double alpha(int n, double t);

/// Finite family K_1..K_N on one net, each about 0 and in John position
/// (B_2 inside K, K inside d B_2, checked up to the net tolerance).
class BodyFamily {
 public:
  explicit BodyFamily(std::vector<SupportBody> bodies, bool check_john = true);

  int size() const noexcept { return static_cast<int>(bodies_.size()); }
  int dim() const noexcept { return net_->dim(); }
  const NetPtr& net() const noexcept { return net_; }
  /// 1-based, matching the schedule index.
  const SupportBody& body(int n) const { return bodies_.at(static_cast<std::size_t>(n - 1)); }

 private:
  std::vector<SupportBody> bodies_;
  NetPtr net_;
};

/// Built-in planar shapes in John position on `net`: "square" ([-1,1]^2),
/// "disk", "triangle" (equilateral, inradius 1).
SupportBody john_shape(const std::string& name, NetPtr net);

/// t -> kappa(t) = sum_n alpha_n(t) K_n.
class KappaMap {
 public:
  explicit KappaMap(BodyFamily family) : family_(std::move(family)) {}

  const BodyFamily& family() const noexcept { return family_; }
  int n_max() const noexcept { return family_.size(); }

  SupportBody at(double t) const;
  /// Bound on the omitted terms: sum_{j > N} alpha_j(t) * 2d.
  double truncation_bound(double t) const;
  /// g(x) = inf{t >= 0 : x in kappa(t)}, exact: each direction's support
  /// value is piecewise linear in t, so its crossing is solved directly.
  /// Returns +inf outside kappa(inf).
  double g(const Point& x) const;
  /// Same quantity by bisection on membership, for cross-checking.
  /// Throws cap-exceeded when x is outside kappa(t_cap).
  double g_bisect(const Point& x, double t_cap) const;
  double default_cap() const;

 private:
  BodyFamily family_;
};

/// f(x) = 2^{-g(cx)}.
class UniversalDensity {
 public:
  UniversalDensity(KappaMap kappa, double c);
  /// Picks c so the total mass is 1; the layer-cake integral of 2^{-g}
  /// uses exact polygon areas, so this is available in d = 2 only.
  static UniversalDensity normalized(KappaMap kappa);

  const KappaMap& kappa() const noexcept { return kappa_; }
  double c() const noexcept { return c_; }
  double g_scaled(const Point& x) const { return kappa_.g(c_ * x); }
  double pdf(const Point& x) const;
  /// The density as a general DensityND (mode 0) with the envelope
  /// g(cx) ln 2 >= m |x| from the tangent cone of g at 0.
  const DensityND& density() const noexcept { return density_; }

 private:
  KappaMap kappa_;
  double c_;
  DensityND density_;
};

/// Integral of 2^{-g} over the plane.
double planar_mass(const KappaMap& kappa);

/// g_eval: g(x) itself (unscaled).
inline double g_eval(const UniversalDensity& f, const Point& x) { return f.kappa().g(x); }

/// sum_{j != n} alpha_j(t) / alpha_n(t) at t = 2^{2n^2}.
double dominance_ratio(int n, int n_max);

/// Banach-Mazur upper bound between kappa(2^{2n^2}) / alpha_n and K_n
/// (best center and homothety).
double bm_density_check(const KappaMap& kappa, int n);

/// d_L between the level set {f >= 2^-n} and kappa(n) / c.
double level_set_identity_check(const UniversalDensity& f, int n);

}  // namespace randpoly
