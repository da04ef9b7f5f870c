#include "randpoly/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "randpoly/error.hpp"
#include "randpoly/hull2d.hpp"
#include "randpoly/json_io.hpp"
#include "randpoly/optimize.hpp"

namespace randpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

void require_dim(const NetPtr& net, const Point& p, const char* what) {
  if (p.size() != net->dim())
    throw Error(ErrorKind::InvalidParameter, std::string(what) + " has the wrong dimension");
}

/// Hyperplane slacks about x: s_i = h_i - <x - c, w_i>.
Eigen::VectorXd slacks(const SupportBody& b, const Point& x) {
  return as_vector(b.values()) - b.net().directions().transpose() * (x - b.center());
}

/// Gauges (about the point the slacks refer to) of each column of theta.
Eigen::ArrayXd gauges(const Eigen::MatrixXd& w, const Eigen::VectorXd& s, const Eigen::MatrixXd& theta) {
  Eigen::MatrixXd m = w.transpose() * theta;
  m.array().colwise() /= s.array();
  return m.colwise().maxCoeff().transpose().array();
}

/// Planar H-polytope vertices relative to the interior point the slacks are
/// taken about: edges of the hull of the dual points w_i / s_i are vertices.
std::vector<Eigen::Vector2d> planar_vertices(const Eigen::MatrixXd& w, const Eigen::VectorXd& s) {
  planar::Polygon dual;
  dual.reserve(static_cast<std::size_t>(w.cols()));
  for (Eigen::Index i = 0; i < w.cols(); ++i) dual.emplace_back(w(0, i) / s[i], w(1, i) / s[i]);
  const planar::Polygon hull = planar::convex_hull(std::move(dual));
  if (hull.size() < 3) throw Error(ErrorKind::InvalidParameter, "support body is unbounded");
  std::vector<Eigen::Vector2d> verts;
  verts.reserve(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double det = a.x() * b.y() - a.y() * b.x();
    if (!(det > 0.0)) throw Error(ErrorKind::InvalidParameter, "support body is unbounded");
    verts.emplace_back((b.y() - a.y()) / det, (a.x() - b.x()) / det);
  }
  // Redundant constraints through a vertex leave near-coincident copies of it.
  double scale = 0.0;
  for (const auto& v : verts) scale = std::max(scale, v.norm());
  std::vector<Eigen::Vector2d> out;
  for (const auto& v : verts)
    if (out.empty() || (v - out.back()).norm() > 1e-12 * scale) out.push_back(v);
  while (out.size() > 1 && (out.back() - out.front()).norm() <= 1e-12 * scale) out.pop_back();
  return out;
}

enum class Spread { Symmetric, Range };

/// log of the distance about x: max |r| (Symmetric) or max r - min r (Range)
/// where r = log gauge_K - log gauge_L over the probe set. +inf when x is
/// not interior to both bodies.
double log_spread_about(const SupportBody& k, const SupportBody& l, const Point& x, Spread spread) {
  const Eigen::VectorXd sk = slacks(k, x);
  const Eigen::VectorXd sl = slacks(l, x);
  if ((sk.array() <= 0.0).any() || (sl.array() <= 0.0).any()) return kInf;

  const auto& wk = k.net().directions();
  const auto& wl = l.net().directions();
  std::vector<const Eigen::MatrixXd*> sets;
  Eigen::MatrixXd extra;
  if (k.dim() != 2) {
    sets.push_back(&k.net().probe_directions());
    if (k.net_ptr() != l.net_ptr()) sets.push_back(&l.net().probe_directions());
  } else {
    // Between consecutive vertex directions of either body both gauges are
    // linear, so the ratio is monotone there and its extremes sit at vertex
    // directions: those alone give the exact planar value.
    const auto vk = planar_vertices(wk, sk);
    const auto vl = planar_vertices(wl, sl);
    extra.resize(2, static_cast<Eigen::Index>(vk.size() + vl.size()));
    Eigen::Index c = 0;
    for (const auto& v : vk) extra.col(c++) = v.normalized();
    for (const auto& v : vl) extra.col(c++) = v.normalized();
    sets.push_back(&extra);
  }

  double hi = -kInf, lo = kInf;
  for (const Eigen::MatrixXd* theta : sets) {
    const Eigen::ArrayXd r = gauges(wk, sk, *theta).log() - gauges(wl, sl, *theta).log();
    if (!r.allFinite()) throw Error(ErrorKind::InvalidParameter, "support body is unbounded");
    hi = std::max(hi, r.maxCoeff());
    lo = std::min(lo, r.minCoeff());
  }
  if (spread == Spread::Symmetric) return std::max({hi, -lo, 0.0});
  return hi - lo;
}

double typical_size(const SupportBody& b) {
  double s = 0.0;
  for (double v : b.values()) s += std::abs(v);
  return s / static_cast<double>(b.values().size());
}

CenterSearch search_centers(const SupportBody& k, const SupportBody& l, Spread spread) {
  if (k.dim() != l.dim()) throw Error(ErrorKind::IncompatibleRepresentation, "bodies differ in dimension");
  std::vector<Point> starts{k.center(), l.center(), 0.5 * (k.center() + l.center())};
  if (k.dim() == 2) {
    for (const SupportBody* b : {&k, &l}) {
      try {
        starts.push_back(centroid(*b));
      } catch (const Error&) {
        // center not interior: no planar centroid from this body
      }
    }
  }
  const auto objective = [&](const Point& x) { return log_spread_about(k, l, x, spread); };
  const double step = 0.1 * std::min(typical_size(k), typical_size(l));

  CenterSearch best{kInf, Point()};
  double best_log = kInf;
  for (const Point& s : starts) {
    double f0 = objective(s);
    if (!std::isfinite(f0)) continue;
    if (f0 < best_log) {
      best_log = f0;
      best.witness_center = s;
    }
    double f1 = f0;
    Point x = nelder_mead(objective, s, step, 400, f1);
    double f2 = f1;
    x = nelder_mead(objective, x, 0.1 * step, 300, f2);
    if (f2 < best_log) {
      best_log = f2;
      best.witness_center = x;
    }
  }
  if (!std::isfinite(best_log))
    throw Error(ErrorKind::DisjointInteriors, "no common interior point found among the start centers");
  best.value = std::exp(best_log);
  return best;
}

}  // namespace

// --- SupportBody -----------------------------------------------------------

SupportBody::SupportBody(NetPtr net, Point center, std::vector<double> values)
    : net_(std::move(net)), center_(std::move(center)), h_(std::move(values)) {
  if (!net_) throw Error(ErrorKind::InvalidParameter, "support body needs a net");
  require_dim(net_, center_, "center");
  if (h_.size() != net_->size())
    throw Error(ErrorKind::IncompatibleRepresentation, "support values do not match the net size");
}

SupportBody SupportBody::recentered(const Point& new_center) const {
  require_dim(net_, new_center, "center");
  const Eigen::VectorXd h = as_vector(h_) + net_->directions().transpose() * (center_ - new_center);
  return {net_, new_center, std::vector<double>(h.data(), h.data() + h.size())};
}

SupportBody SupportBody::translated(const Point& shift) const {
  require_dim(net_, shift, "shift");
  return {net_, center_ + shift, h_};
}

SupportBody SupportBody::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidParameter, "scale factor must be positive");
  std::vector<double> h(h_);
  for (double& v : h) v *= factor;
  return {net_, center_, std::move(h)};
}

double SupportBody::slack(std::size_t i, const Point& x) const {
  return h_[i] - net_->directions().col(static_cast<Eigen::Index>(i)).dot(x - center_);
}

bool SupportBody::center_interior() const noexcept {
  return std::all_of(h_.begin(), h_.end(), [](double v) { return v > 0.0; });
}

// --- RadialBody ------------------------------------------------------------

RadialBody::RadialBody(NetPtr net, Point center, std::vector<double> rho)
    : net_(std::move(net)), center_(std::move(center)), rho_(std::move(rho)) {
  if (!net_) throw Error(ErrorKind::InvalidParameter, "radial body needs a net");
  require_dim(net_, center_, "center");
  if (rho_.size() != net_->size())
    throw Error(ErrorKind::IncompatibleRepresentation, "radial values do not match the net size");
  if (std::any_of(rho_.begin(), rho_.end(), [](double r) { return !(r > 0.0); }))
    throw Error(ErrorKind::InvalidParameter, "radial values must be positive");
}

SupportBody RadialBody::to_support() const {
  const auto& w = net_->directions();
  Eigen::MatrixXd gram = w.transpose() * w;
  gram.array().colwise() *= as_vector(rho_).array();
  const Eigen::VectorXd h = gram.colwise().maxCoeff().transpose();
  return {net_, center_, std::vector<double>(h.data(), h.data() + h.size())};
}

// --- operations ------------------------------------------------------------

SupportBody support_of_points(const Eigen::MatrixXd& points, NetPtr net, const Point& center) {
  if (points.cols() == 0) throw Error(ErrorKind::InvalidParameter, "support_of_points needs at least one point");
  if (points.rows() != net->dim()) throw Error(ErrorKind::InvalidParameter, "points have the wrong dimension");
  require_dim(net, center, "center");
  const auto& w = net->directions();
  Eigen::VectorXd h = Eigen::VectorXd::Constant(w.cols(), -kInf);
  constexpr Eigen::Index kChunk = 4096;
  for (Eigen::Index start = 0; start < points.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, points.cols() - start);
    const Eigen::MatrixXd shifted = points.middleCols(start, len).colwise() - center;
    h = h.cwiseMax((w.transpose() * shifted).rowwise().maxCoeff());
  }
  return {std::move(net), center, std::vector<double>(h.data(), h.data() + h.size())};
}

double gauge_about(const SupportBody& body, const Point& x, const Point& about) {
  require_dim(body.net_ptr(), x, "point");
  const Eigen::VectorXd s = slacks(body, about);
  if ((s.array() <= 0.0).any()) throw Error(ErrorKind::CenterNotInterior, "gauge center is not interior");
  const Eigen::VectorXd proj = body.net().directions().transpose() * (x - about);
  return std::max(0.0, (proj.array() / s.array()).maxCoeff());
}

double gauge(const SupportBody& body, const Point& x) { return gauge_about(body, x, body.center()); }

RadialBody polar(const SupportBody& body) {
  if (body.center().norm() > 1e-12) throw Error(ErrorKind::PolarRequiresOrigin, "polar needs the body about 0");
  if (!body.center_interior()) throw Error(ErrorKind::CenterNotInterior, "0 is not interior");
  std::vector<double> rho(body.values());
  for (double& r : rho) r = 1.0 / r;
  return {body.net_ptr(), body.center(), std::move(rho)};
}

SupportBody polar(const RadialBody& body) {
  if (body.center().norm() > 1e-12) throw Error(ErrorKind::PolarRequiresOrigin, "polar needs the body about 0");
  std::vector<double> h(body.values());
  for (double& v : h) v = 1.0 / v;
  return {body.net_ptr(), body.center(), std::move(h)};
}

double hausdorff_distance(const SupportBody& k, const SupportBody& l) {
  if (k.net_ptr() != l.net_ptr() && k.net().ref() != l.net().ref())
    throw Error(ErrorKind::IncompatibleRepresentation, "hausdorff_distance needs both bodies on one net");
  const SupportBody lr = (l.center() - k.center()).norm() == 0.0 ? l : l.recentered(k.center());
  double d = 0.0;
  for (std::size_t i = 0; i < k.values().size(); ++i) d = std::max(d, std::abs(k.value(i) - lr.value(i)));
  return d;
}

double log_hausdorff_about(const SupportBody& k, const SupportBody& l, const Point& x) {
  require_dim(k.net_ptr(), x, "center");
  const double v = log_spread_about(k, l, x, Spread::Symmetric);
  if (!std::isfinite(v)) throw Error(ErrorKind::PointNotInterior, "point is not interior to both bodies");
  return std::exp(v);
}

CenterSearch log_hausdorff(const SupportBody& k, const SupportBody& l) {
  return search_centers(k, l, Spread::Symmetric);
}

double bm_upper(const SupportBody& k, const SupportBody& l) {
  const double v = log_hausdorff(k, l).value;
  return v * v;
}

CenterSearch bm_upper_homothetic(const SupportBody& k, const SupportBody& l) {
  return search_centers(k, l, Spread::Range);
}

std::vector<Point> vertices_2d(const SupportBody& body) {
  if (body.dim() != 2) throw Error(ErrorKind::InvalidParameter, "vertices_2d needs a planar body");
  if (!body.center_interior()) throw Error(ErrorKind::CenterNotInterior, "center is not interior");
  const auto rel = planar_vertices(body.net().directions(), as_vector(body.values()));
  std::vector<Point> out;
  out.reserve(rel.size());
  for (const auto& v : rel) out.emplace_back(body.center() + v);
  return out;
}

namespace {
planar::Polygon as_polygon(const std::vector<Point>& verts) {
  planar::Polygon poly;
  for (const auto& v : verts) poly.emplace_back(v[0], v[1]);
  return poly;
}
}  // namespace

double area_2d(const SupportBody& body) { return std::abs(planar::signed_area(as_polygon(vertices_2d(body)))); }

Point centroid(const SupportBody& body) {
  if (body.dim() != 2) return body.center();
  const planar::Vec2 c = planar::centroid(as_polygon(vertices_2d(body)));
  Point p(2);
  p << c.x(), c.y();
  return p;
}

double inradius_about(const SupportBody& body, const Point& x) {
  require_dim(body.net_ptr(), x, "point");
  return std::max(0.0, slacks(body, x).minCoeff());
}

double circumradius_about(const SupportBody& body, const Point& x) {
  require_dim(body.net_ptr(), x, "point");
  if (body.dim() == 2) {
    double r = 0.0;
    for (const auto& v : vertices_2d(body.recentered(x))) r = std::max(r, (v - x).norm());
    return r;
  }
  const Eigen::VectorXd s = slacks(body, x);
  if ((s.array() <= 0.0).any()) throw Error(ErrorKind::CenterNotInterior, "point is not interior");
  const Eigen::ArrayXd g = gauges(body.net().directions(), s, body.net().probe_directions());
  return 1.0 / g.minCoeff();
}

double diameter(const SupportBody& body) {
  if (body.dim() == 1) return body.values()[0] + body.values()[1];
  if (body.dim() == 2) {
    const auto verts = vertices_2d(body);
    double d = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j) d = std::max(d, (verts[i] - verts[j]).norm());
    return d;
  }
  // Chords through the center, over the probe set.
  const Eigen::VectorXd s = as_vector(body.values());
  const auto& probes = body.net().probe_directions();
  const Eigen::ArrayXd gp = gauges(body.net().directions(), s, probes);
  const Eigen::ArrayXd gm = gauges(body.net().directions(), s, -probes);
  return (1.0 / gp + 1.0 / gm).maxCoeff();
}

// --- JSON ------------------------------------------------------------------

namespace {
std::string body_json(const std::string& kind, const DirectionNet& net, const Point& center,
                      const std::vector<double>& values, const std::string& extra) {
  std::string out = "{\"net_ref\": " + io::quote(net.ref()) + ", \"center\": " + io::format_vector(center) +
                    ", \"kind\": " + io::quote(kind) + ", \"values\": " + io::format_array(values);
  if (!extra.empty()) out += ", " + extra;
  out += "}";
  return out;
}
}  // namespace

std::string to_json(const SupportBody& body, const std::string& extra_fields) {
  return body_json("support", body.net(), body.center(), body.values(), extra_fields);
}

std::string to_json(const RadialBody& body, const std::string& extra_fields) {
  return body_json("radial", body.net(), body.center(), body.values(), extra_fields);
}

SupportBody BodyRecord::as_support() const {
  if (kind == "support") return {net, center, values};
  if (kind == "radial") return RadialBody(net, center, values).to_support();
  throw Error(ErrorKind::ConfigError, "unknown body kind '" + kind + "'");
}

BodyRecord body_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BodyRecord r;
    r.kind = j.at("kind").get<std::string>();
    r.net = net_from_ref(j.at("net_ref").get<std::string>());
    const auto c = j.at("center").get<std::vector<double>>();
    r.center = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    r.values = j.at("values").get<std::vector<double>>();
    if (j.contains("delta")) r.delta = j.at("delta").get<double>();
    if (j.contains("density_ref")) r.density_ref = j.at("density_ref").get<std::string>();
    if (r.values.size() != r.net->size())
      throw Error(ErrorKind::ConfigError, "body values do not match the referenced net");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("body JSON: ") + e.what());
  }
}

}  // namespace randpoly
