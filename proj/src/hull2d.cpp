#include "randpoly/hull2d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "randpoly/error.hpp"

namespace randpoly::planar {

double cross(const Vec2& a, const Vec2& b, const Vec2& c) noexcept {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

namespace {

bool lex_less(const Vec2& a, const Vec2& b) noexcept {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

}  // namespace

Polygon convex_hull(Polygon pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  if (pts.size() < 3) return pts;

  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Polygon convex_hull(const Eigen::MatrixXd& points) {
  if (points.rows() != 2) throw Error(ErrorKind::InvalidParameter, "convex_hull expects 2 x n points");
  const Eigen::Index n = points.cols();
  if (n == 0) return {};

  // Extremes in x, y, x+y, x-y span a quadrilateral contained in the hull.
  std::array<Eigen::Index, 8> ext{};
  std::array<double, 8> best;
  best.fill(-std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = points(0, i), y = points(1, i);
    const std::array<double, 8> keys{x, -x, y, -y, x + y, -x - y, x - y, y - x};
    for (std::size_t j = 0; j < 8; ++j) {
      if (keys[j] > best[j]) {
        best[j] = keys[j];
        ext[j] = i;
      }
    }
  }
  // ccw order of the extremes: +x, +(x+y), +y, -(x-y)... sorted by angle of key direction
  const std::array<std::size_t, 8> order{0, 4, 2, 7, 1, 5, 3, 6};
  Polygon ring;
  for (std::size_t j : order) {
    Vec2 p(points(0, ext[j]), points(1, ext[j]));
    if (ring.empty() || ring.back() != p) ring.push_back(p);
  }
  while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  const bool use_filter = ring.size() >= 3 && std::abs(signed_area(ring)) > 0.0;

  Polygon candidates;
  candidates.reserve(static_cast<std::size_t>(std::min<Eigen::Index>(n, 4096)));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec2 p(points(0, i), points(1, i));
    if (use_filter) {
      bool inside = true;
      for (std::size_t j = 0; j < ring.size() && inside; ++j) {
        const Vec2& a = ring[j];
        const Vec2& b = ring[(j + 1) % ring.size()];
        if (a == b) continue;
        if (cross(a, b, p) <= 0.0) inside = false;
      }
      if (inside) continue;
    }
    candidates.push_back(p);
  }
  return convex_hull(std::move(candidates));
}

double signed_area(const Polygon& poly) noexcept {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Vec2 centroid(const Polygon& poly) {
  if (poly.empty()) throw Error(ErrorKind::InvalidPolygon, "centroid of empty polygon");
  const double area = signed_area(poly);
  if (std::abs(area) < 1e-300) {
    Vec2 mean = Vec2::Zero();
    for (const auto& p : poly) mean += p;
    return mean / static_cast<double>(poly.size());
  }
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double w = p.x() * q.y() - q.x() * p.y();
    c += (p + q) * w;
  }
  return c / (6.0 * area);
}

bool is_convex_ccw(const Polygon& poly) noexcept {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) <= 0.0) return false;
  }
  // A star polygon can turn left at every vertex; total turning must be 2*pi.
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = poly[(i + 1) % n] - poly[i];
    const Vec2 e2 = poly[(i + 2) % n] - poly[(i + 1) % n];
    turning += std::atan2(e1.x() * e2.y() - e1.y() * e2.x(), e1.dot(e2));
  }
  return std::abs(turning - 2.0 * M_PI) < 1e-6;
}

Polygon clip_above(const Polygon& poly, const Vec2& normal, double offset) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double sp = p.dot(normal) - offset;
    const double sq = q.dot(normal) - offset;
    if (sp >= 0.0) out.push_back(p);
    if ((sp >= 0.0) != (sq >= 0.0)) {
      const double t = sp / (sp - sq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

double hausdorff_to_disk(const Polygon& poly, const Vec2& center, double radius) {
  if (poly.empty()) throw Error(ErrorKind::InvalidPolygon, "empty polygon");
  // Support gap over all directions: the polygon's support exceeds the
  // disk's most at a vertex direction and falls short most at an edge normal.
  // Assumes `center` lies inside the polygon.
  double gap = 0.0;
  for (const auto& v : poly) gap = std::max(gap, (v - center).norm() - radius);
  const std::size_t n = poly.size();
  if (n >= 3) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e = poly[(i + 1) % n] - poly[i];
      const Vec2 outward = Vec2(e.y(), -e.x()).normalized();
      gap = std::max(gap, radius - (poly[i] - center).dot(outward));
    }
  } else {
    gap = std::max(gap, radius);
  }
  return gap;
}

}  // namespace randpoly::planar
