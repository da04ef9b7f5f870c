#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "randpoly/error.hpp"
#include "randpoly/float_bodies.hpp"

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

}  // namespace

TEST_CASE("Gaussian floating polytope is the quantile ball") {
  const auto net = shared_net(2, 0.1, 1);
  const auto g = DensityND::gaussian(2);
  for (double delta : {1e-2, 1e-4, 0.36}) {
    const auto f = floating_polytope(g, net, delta);
    const double r = oracle::normal_upper_quantile(delta);
    for (double h : f.body.values()) CHECK(h == doctest::Approx(r).epsilon(1e-9));
    CHECK(f.max_ci == 0.0);
  }
  CHECK(oracle::normal_upper_quantile(0.01) == doctest::Approx(2.3263).epsilon(1e-4));
  CHECK(kind_of([&] { floating_polytope(g, net, std::exp(-1.0)); }) == ErrorKind::PossiblyEmpty);
  CHECK(kind_of([&] { floating_polytope(g, net, 0.5); }) == ErrorKind::PossiblyEmpty);
}

TEST_CASE("floating polytopes grow as delta shrinks") {
  const auto net = shared_net(2, 0.2, 1);
  const auto d = DensityND::product({Density1D::exp_power(1.0), Density1D::exp_power(3.0)});
  const auto a = floating_polytope(d, net, 1e-2);
  const auto b = floating_polytope(d, net, 5e-3);
  for (std::size_t i = 0; i < net->size(); ++i) CHECK(a.body.value(i) < b.body.value(i));
}

TEST_CASE("level sets") {
  const auto net = shared_net(2, 0.1, 1);
  for (double p : {1.0, 2.0, 3.0}) {
    const auto sz = DensityND::schechtman_zinn(2, p);
    const double c = p / (2.0 * std::tgamma(1.0 / p));
    const double delta = 1e-3;
    const auto d = level_set_body(sz, net, delta);
    CHECK(d.body.values()[0] == doctest::Approx(std::pow(std::log(c * c / delta), 1.0 / p)).epsilon(1e-9));
  }
  const auto g = DensityND::gaussian(2);
  const double phi0 = 1.0 / (2.0 * M_PI);
  const auto d = level_set_body(g, net, phi0 / std::exp(1.0));
  for (double r : d.body.values()) CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  const auto tiny = level_set_body(g, net, phi0 * (1.0 - 1e-12));
  for (double r : tiny.body.values()) CHECK(r < 1e-5);
  CHECK(kind_of([&] { level_set_body(g, net, phi0); }) == ErrorKind::EmptyLevelSet);
}

TEST_CASE("Radon bodies") {
  const auto net = shared_net(2, 0.1, 1);
  const auto g = DensityND::gaussian(2);
  const double delta = 1e-3;
  const double t = std::sqrt(-2.0 * std::log(delta * std::sqrt(2.0 * M_PI)));
  const auto r = radon_body(g, net, delta);
  for (double h : r.body.values()) CHECK(h == doctest::Approx(t).epsilon(1e-9));
  const auto rad = DensityND::radial_exp_power(2, 1.0);
  const auto rr = radon_body(rad, net, 1e-4);
  for (double h : rr.body.values()) CHECK(h == doctest::Approx(rr.body.values()[0]).epsilon(1e-9));
  CHECK(kind_of([&] { radon_body(g, net, 0.5); }) == ErrorKind::DeltaTooLarge);
}

TEST_CASE("Radon and floating roots stay a bounded distance apart") {
  const auto g = Density1D::gaussian();
  double worst = 0.0;
  for (double delta : {1e-2, 1e-3, 1e-4, 1e-6, 1e-8, 1e-12}) {
    const double s = g.upper_quantile(delta);
    const double t = std::sqrt(-2.0 * std::log(delta * std::sqrt(2.0 * M_PI)));
    worst = std::max(worst, std::abs(s - t));
  }
  CHECK(worst <= 1.0);

  const auto net = shared_net(2, 0.2, 1);
  const auto d = DensityND::radial_exp_power(2, 1.5);
  for (double delta : {1e-3, 1e-6, 1e-9}) {
    const auto f = floating_polytope(d, net, delta);
    const auto r = radon_body(d, net, delta);
    CHECK(std::abs(f.body.values()[0] - r.body.values()[0]) <= 1.0);
  }
}

TEST_CASE("inner inclusion of the shrunk level set") {
  const auto net = shared_net(2, 0.1, 1);
  const auto sz = DensityND::schechtman_zinn(2, 2.0);
  for (double delta : {1e-2, 1e-4, 1e-6}) {
    const auto d = level_set_body(sz, net, delta).body.to_support();
    const double lambda = 1.0 / area_2d(d);
    const auto f = floating_polytope(sz, net, delta);
    for (std::size_t i = 0; i < net->size(); ++i)
      CHECK(d.value(i) / (1.0 + 8.0 * std::sqrt(lambda)) <= f.body.value(i));
  }
}

TEST_CASE("convex floating body of the unit square") {
  const auto net = shared_net(2, 0.1, 1);
  const planar::Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto k = convex_floating_body_2d(sq, 0.01, net);
  CHECK(k.center().isApprox((Point(2) << 0.5, 0.5).finished()));
  CHECK(k.values()[0] == doctest::Approx(0.5 - 0.01).epsilon(1e-10));  // cap line at x = 1 - lambda
  CHECK(cap_area(sq, {1.0, 0.0}, 0.7) == doctest::Approx(0.3));
  CHECK(cap_area(sq, {1.0, 0.0}, -1.0) == doctest::Approx(1.0));
}

TEST_CASE("convex floating body of a triangle toward a vertex") {
  const auto net = shared_net(2, 0.1, 1);
  const double hgt = std::sqrt(3.0) / 2.0;
  const planar::Polygon tri{{0, 0}, {1, 0}, {0.5, hgt}};
  for (double lambda : {0.01, 0.1, 0.3}) {
    const auto k = convex_floating_body_2d(tri, lambda, net);
    const double t = hgt * (1.0 - std::sqrt(lambda));
    CHECK(k.values()[8] == doctest::Approx(t - hgt / 3.0).epsilon(1e-10));  // direction e2
  }
}

TEST_CASE("convex floating body is close to the body for small lambda") {
  const auto net = shared_net(2, 0.05, 1);
  const std::vector<planar::Polygon> polys{
      {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 0}, {1, 0}, {0.5, 0.8}}, {{0, 0}, {3, 0}, {4, 1}, {2, 2}, {-0.5, 1}}};
  for (const auto& poly : polys) {
    const double lambda = 0.01;
    const auto kl = convex_floating_body_2d(poly, lambda, net);
    Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(poly.size()));
    for (std::size_t i = 0; i < poly.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = poly[i];
    const auto k = support_of_points(pts, net, kl.center());
    CHECK(log_hausdorff_about(k, kl, kl.center()) <= 1.0 + 8.0 * std::sqrt(lambda));
  }
  const planar::Polygon bad{{0, 0}, {1, 0}, {0.2, 0.2}, {0, 1}};
  CHECK(kind_of([&] { convex_floating_body_2d(bad, 0.1, net); }) == ErrorKind::InvalidPolygon);
}

TEST_CASE("zeta") {
  const auto g1 = DensityND::gaussian(1);
  const double eps = oracle::normal_pdf(3.0);
  const auto z = zeta(g1, eps, 1'000'000, 3);
  CHECK(std::abs(z.estimate - 2.0 * oracle::normal_tail(3.0)) <= z.ci);

  const auto high = zeta(g1, 1.0, 10000, 3);
  CHECK(high.estimate == 1.0);

  const auto g2 = DensityND::gaussian(2);
  double first = 0.0;
  for (double e : {1e-2, 1e-3, 1e-4}) {
    const auto est = zeta(g2, e, 1'000'000, 5);
    // mu{f < e} = 2 pi e exactly for the planar Gaussian.
    CHECK(std::abs(est.estimate - 2.0 * M_PI * e) <= est.ci + 1e-12);
    const double ratio = est.estimate / (e * std::pow(std::log(1.0 / e), 2));
    if (first == 0.0) first = ratio;
    CHECK(ratio <= 1.2 * first);
  }
}

TEST_CASE("floating body JSON carries metadata") {
  const auto net = shared_net(2, 0.2, 1);
  const auto f = floating_polytope(DensityND::gaussian(2), net, 0.01);
  const auto rec = body_from_json(to_json(f));
  REQUIRE(rec.delta.has_value());
  CHECK(*rec.delta == 0.01);
  CHECK(rec.density_ref == f.density_ref);
  CHECK(rec.values == f.body.values());
}
