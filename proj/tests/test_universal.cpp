#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "randpoly/error.hpp"
#include "randpoly/sampler.hpp"
#include "randpoly/universal.hpp"

using namespace randpoly;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ConfigError;
}

KappaMap family_map(std::vector<std::string> names, double eps = 0.1) {
  const auto net = shared_net(2, eps, 1);
  std::vector<SupportBody> bodies;
  for (const auto& n : names) bodies.push_back(john_shape(n, net));
  return KappaMap(BodyFamily(std::move(bodies)));
}

}  // namespace

TEST_CASE("alpha schedule") {
  for (int n = 1; n <= 4; ++n) {
    const double tb = std::ldexp(1.0, 2 * n * n);
    CHECK(alpha(n, tb) == std::ldexp(1.0, n * n));
    CHECK(alpha(n, std::nextafter(tb, 1e300)) == std::ldexp(1.0, n * n));
    CHECK(alpha(n, 0.0) == 0.0);
    // Non-decreasing and concave on a grid.
    double prev = 0.0, prev_slope = 1e300;
    for (int k = 1; k <= 200; ++k) {
      const double t = 2.0 * tb * k / 200.0;
      const double a = alpha(n, t);
      CHECK(a >= prev);
      const double slope = (a - prev) / (2.0 * tb / 200.0);
      CHECK(slope <= prev_slope + 1e-12);
      prev = a;
      prev_slope = slope;
    }
  }
  CHECK(alpha(2, 4.0) == 0.25);
  CHECK(kind_of([] { alpha(0, 1.0); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("kappa values") {
  const auto k = family_map({"square", "disk"});
  const auto at0 = k.at(0.0);
  for (double h : at0.values()) CHECK(h == 0.0);
  const auto sq = john_shape("square", k.family().net());
  const auto at4 = k.at(4.0);
  for (std::size_t i = 0; i < at4.values().size(); ++i)
    CHECK(at4.value(i) == doctest::Approx(2.0 * sq.value(i) + 0.25).epsilon(1e-15));
  double omitted = 0.0;
  for (int j = 3; j <= 22; ++j) omitted += 4.0 * std::ldexp(1.0, -j * j);
  CHECK(k.truncation_bound(4.0) == doctest::Approx(omitted * 4.0).epsilon(1e-14));
}

TEST_CASE("kappa is concave in t") {
  const auto k = family_map({"square", "disk", "triangle"});
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const double t1 = std::exp(8.0 * rng.uniform()) - 1.0, t2 = std::exp(8.0 * rng.uniform()) - 1.0;
    const double lam = rng.uniform();
    const auto a = k.at(t1), b = k.at(t2), m = k.at(lam * t1 + (1 - lam) * t2);
    for (std::size_t i = 0; i < a.values().size(); ++i)
      CHECK(lam * a.value(i) + (1 - lam) * b.value(i) <= m.value(i) * (1 + 1e-12) + 1e-12);
  }
}

TEST_CASE("g: exact inversion against bisection") {
  const auto k = family_map({"square", "disk", "triangle"});
  CHECK(k.g(Point::Zero(2)) == 0.0);
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Point x = rng.direction(2) * std::exp(6.0 * rng.uniform() - 2.0);
    const double exact = k.g(x);
    CHECK(exact == doctest::Approx(k.g_bisect(x, k.default_cap())).epsilon(1e-9));
  }
  // Boundary points of kappa(t0) map back to t0.
  for (double t0 : {0.5, 3.0, 40.0, 1000.0}) {
    const auto body = k.at(t0);
    for (const auto& v : vertices_2d(body)) CHECK(k.g(v) == doctest::Approx(t0).epsilon(1e-9));
  }
  const Point far = Point::Constant(2, 1e8);
  CHECK(std::isinf(k.g(far)));
  CHECK(kind_of([&] { k.g_bisect(far, 1e3); }) == ErrorKind::CapExceeded);
}

TEST_CASE("g is convex along random segments") {
  const auto k = family_map({"square", "disk", "triangle"});
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const Point a = rng.direction(2) * 40.0 * rng.uniform();
    const Point b = rng.direction(2) * 40.0 * rng.uniform();
    const double lam = rng.uniform();
    const double mid = k.g(lam * a + (1 - lam) * b);
    CHECK(mid <= lam * k.g(a) + (1 - lam) * k.g(b) + 1e-9 * (1 + mid));
  }
}

TEST_CASE("level sets of g are the kappa bodies") {
  const auto k = family_map({"square", "disk"});
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const double t = std::exp(5.0 * rng.uniform());
    const Point x = rng.direction(2) * std::exp(5.0 * rng.uniform() - 1.0);
    const double gauge_t = gauge(k.at(t), x);
    if (std::abs(gauge_t - 1.0) < 1e-9) continue;
    CHECK((k.g(x) <= t) == (gauge_t <= 1.0));
  }
}

TEST_CASE("normalisation by an independent polar integral") {
  const auto k = family_map({"square", "disk", "triangle"});
  const auto f = UniversalDensity::normalized(k);
  CHECK(f.c() > 0.0);
  // Integrate 2^{-g(cx)} in polar coordinates with tanh-sinh.
  const int sectors = 64;
  double total = 0.0;
  for (int s = 0; s < sectors; ++s) {
    const double phi = 2.0 * M_PI * (s + 0.5) / sectors;
    const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));
    total += oracle::integrate([&](double r) { return r * f.pdf(r * dir); }, 0.0, 60.0 / f.c(), 1e-6);
  }
  total *= 2.0 * M_PI / sectors;
  MESSAGE("polar mass " << total);
  CHECK(total == doctest::Approx(1.0).epsilon(2e-3));
  // The general-density view evaluates the same function.
  const Point x = (Point(2) << 0.3, -0.1).finished();
  CHECK(f.density().pdf(x) == doctest::Approx(f.pdf(x)).epsilon(1e-12));
}

TEST_CASE("dominance ratios") {
  CHECK(dominance_ratio(1, 3) == doctest::Approx(0.12890625));
  CHECK(dominance_ratio(2, 3) == doctest::Approx(0.15625));
  CHECK(dominance_ratio(3, 3) == doctest::Approx(0.03515625));
  for (int n = 1; n <= 6; ++n) CHECK(dominance_ratio(n, 6) <= std::ldexp(1.0, -n + 2));
  CHECK(kind_of([] { dominance_ratio(4, 3); }) == ErrorKind::OutOfFamily);
}

TEST_CASE("Banach-Mazur checks against the family") {
  const auto k = family_map({"square", "disk", "triangle"});
  for (int n = 1; n <= 3; ++n) CHECK(bm_density_check(k, n) <= 1.0 + std::ldexp(1.0, -n + 2) * 2.0);
  const auto same = family_map({"disk", "disk", "disk"});
  for (int n = 1; n <= 3; ++n) CHECK(bm_density_check(same, n) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(kind_of([&] { bm_density_check(k, 4); }) == ErrorKind::OutOfFamily);
}

TEST_CASE("family validation") {
  const auto net = shared_net(2, 0.1, 1);
  CHECK(kind_of([&] { BodyFamily({john_shape("square", net).scaled(0.5)}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { BodyFamily({john_shape("disk", net).scaled(3.0)}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { BodyFamily(std::vector<SupportBody>{}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([&] { john_shape("hexagon", net); }) == ErrorKind::ConfigError);
}

TEST_CASE("level-set identity, also after rescaling c") {
  const auto k = family_map({"square", "disk", "triangle"});
  const auto f = UniversalDensity::normalized(k);
  for (int n = 1; n <= 3; ++n) CHECK(level_set_identity_check(f, n) <= 1.05);
  const UniversalDensity g(k, 2.0 * f.c());
  CHECK(level_set_identity_check(g, 2) <= 1.05);
  CHECK(kind_of([&] { level_set_identity_check(f, 0); }) == ErrorKind::EmptyLevelSet);
}

TEST_CASE("universal density can be sampled") {
  const auto f = UniversalDensity::normalized(family_map({"square", "disk", "triangle"}));
  const auto s = sample(f.density(), 2000, 7);
  CHECK(s.points.allFinite());
  // Median of g(cX): mass of {g <= 1} is roughly half for this density scale.
  int below = 0;
  for (Eigen::Index i = 0; i < s.points.cols(); ++i) below += f.g_scaled(s.points.col(i)) <= 1.0;
  CHECK(below > 0);
  CHECK(below < 2000);
}
