#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "randpoly/direction_net.hpp"

namespace randpoly {

using Point = Eigen::VectorXd;

/// A convex body stored as support values on a direction net:
///   K = { x : <x - center, w> <= h(w) for every net direction w }.
/// This is the circumscribed net polytope of whatever body produced the
/// values; gauges and distances below are exact for it.
class SupportBody {
 public:
  SupportBody(NetPtr net, Point center, std::vector<double> values);

  const DirectionNet& net() const noexcept { return *net_; }
  const NetPtr& net_ptr() const noexcept { return net_; }
  int dim() const noexcept { return net_->dim(); }
  const Point& center() const noexcept { return center_; }
  const std::vector<double>& values() const noexcept { return h_; }
  double value(std::size_t i) const { return h_[i]; }

  /// Same set, support values re-expressed about `new_center`.
  SupportBody recentered(const Point& new_center) const;
  /// The set moved by `shift`.
  SupportBody translated(const Point& shift) const;
  /// Homothety by `factor` about the stored center.
  SupportBody scaled(double factor) const;

  /// Distance from `x` to the hyperplane of direction i (negative outside).
  double slack(std::size_t i, const Point& x) const;
  bool center_interior() const noexcept;

 private:
  NetPtr net_;
  Point center_;
  std::vector<double> h_;
};

/// V-representation companion: the hull of { center + rho(w) w }.
class RadialBody {
 public:
  RadialBody(NetPtr net, Point center, std::vector<double> rho);

  const DirectionNet& net() const noexcept { return *net_; }
  const NetPtr& net_ptr() const noexcept { return net_; }
  const Point& center() const noexcept { return center_; }
  const std::vector<double>& values() const noexcept { return rho_; }

  /// Exact support values of the hull in the net directions.
  SupportBody to_support() const;

 private:
  NetPtr net_;
  Point center_;
  std::vector<double> rho_;
};

/// h(w) = max_i <x_i - center, w> over the columns of `points`.
SupportBody support_of_points(const Eigen::MatrixXd& points, NetPtr net, const Point& center);

/// Minkowski functional about the body's center.
double gauge(const SupportBody& body, const Point& x);
/// Minkowski functional about an arbitrary interior point.
double gauge_about(const SupportBody& body, const Point& x, const Point& about);

RadialBody polar(const SupportBody& body);
SupportBody polar(const RadialBody& body);

double hausdorff_distance(const SupportBody& k, const SupportBody& l);

/// exp(sup_theta |log |theta|_K - log |theta|_L|), gauges taken about x.
double log_hausdorff_about(const SupportBody& k, const SupportBody& l, const Point& x);

struct CenterSearch {
  double value = 1.0;
  Point witness_center;
};

/// Best-found infimum over centers (multi-start downhill simplex). Never
/// larger than log_hausdorff_about at any start point.
CenterSearch log_hausdorff(const SupportBody& k, const SupportBody& l);

/// log_hausdorff(k, l)^2, an upper bound for the Banach-Mazur distance.
double bm_upper(const SupportBody& k, const SupportBody& l);

/// Banach-Mazur upper bound after the best homothety of k: for each center
/// the optimal scale turns d_L^2 into exp(max r - min r) with r the log
/// gauge ratio. Used where bodies live at unrelated scales.
CenterSearch bm_upper_homothetic(const SupportBody& k, const SupportBody& l);

/// Vertices (counter-clockwise) of a planar support body.
std::vector<Point> vertices_2d(const SupportBody& body);
double area_2d(const SupportBody& body);
/// Polygon centroid in the plane; the stored center otherwise.
Point centroid(const SupportBody& body);

/// Largest r with B(x, r) inside the body (exact for the H-representation).
double inradius_about(const SupportBody& body, const Point& x);
/// Smallest R with the body inside B(x, R); exact in the plane, probe-based
/// otherwise.
double circumradius_about(const SupportBody& body, const Point& x);
double diameter(const SupportBody& body);

/// Body JSON: {net_ref, center, kind, values, ...extra}.
std::string to_json(const SupportBody& body, const std::string& extra_fields = "");
std::string to_json(const RadialBody& body, const std::string& extra_fields = "");

struct BodyRecord {
  std::string kind;  // "support" | "radial"
  NetPtr net;
  Point center;
  std::vector<double> values;
  std::optional<double> delta;
  std::string density_ref;

  SupportBody as_support() const;
};

BodyRecord body_from_json(const std::string& text);

}  // namespace randpoly
