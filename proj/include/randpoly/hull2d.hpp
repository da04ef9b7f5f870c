#pragma once

#include <vector>

#include <Eigen/Core>

namespace randpoly::planar {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

/// z-component of (b - a) x (c - a).
double cross(const Vec2& a, const Vec2& b, const Vec2& c) noexcept;

/// Andrew's monotone chain. Returns hull vertices in counter-clockwise order
/// starting from the lexicographically smallest point; collinear boundary
/// points are dropped.
Polygon convex_hull(Polygon points);

/// Hull of the columns of a 2 x n matrix. Points strictly inside the
/// Akl-Toussaint quadrilateral are discarded before sorting.
Polygon convex_hull(const Eigen::MatrixXd& points);

double signed_area(const Polygon& poly) noexcept;
Vec2 centroid(const Polygon& poly);

/// True for a strictly convex counter-clockwise polygon with >= 3 vertices.
bool is_convex_ccw(const Polygon& poly) noexcept;

/// Part of a convex polygon lying in {x : <x, normal> >= offset}.
Polygon clip_above(const Polygon& poly, const Vec2& normal, double offset);

/// Exact Hausdorff distance between a convex polygon (ccw) and the disk of
/// radius `radius` about `center`.
double hausdorff_to_disk(const Polygon& poly, const Vec2& center, double radius);

}  // namespace randpoly::planar
