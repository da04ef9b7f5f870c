#include <cmath>

#include "doctest.h"
#include "randpoly/direction_net.hpp"
#include "randpoly/error.hpp"
#include "randpoly/rng.hpp"

using namespace randpoly;

namespace {
Eigen::VectorXd random_vector(Rng& rng, int dim) {
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = 3.0 * rng.normal();
  return x;
}
}  // namespace

TEST_CASE("planar net has the fewest directions with covering chord <= eps") {
  const auto net = DirectionNet::build(2, 0.1, 7);
  // 2 sin(pi / 2k) <= 0.1 first holds at k = 32.
  CHECK(net.size() == 32);
  CHECK(net.covering_radius() <= 0.1);
  CHECK(net.covering_radius() == doctest::Approx(2.0 * std::sin(M_PI / 64.0)).epsilon(1e-12));
  const auto report = validate(net, 10000, 3);
  CHECK(report.ok());
}

TEST_CASE("three-dimensional net passes every invariant") {
  for (double eps : {0.3, 0.5}) {
    const auto net = DirectionNet::build(3, eps, 11);
    const auto report = validate(net, 10000, 5);
    CHECK(report.unit_norm);
    CHECK(report.packing);
    CHECK(report.covering);
    CHECK(report.cardinality);
    CHECK(report.min_separation > eps);
    CHECK(net.size() <= std::pow(3.0 / eps, 3));
  }
}

TEST_CASE("the four axes form a valid 1.0-net of the circle") {
  Eigen::MatrixXd axes(2, 4);
  axes << 1, 0, -1, 0, 0, 1, 0, -1;
  const auto report = validate_directions(axes, 1.0, 1000, 1);
  CHECK(report.ok());
  CHECK(report.min_separation == doctest::Approx(std::sqrt(2.0)));
  CHECK(report.covering_radius == doctest::Approx(2.0 * std::sin(M_PI / 8.0)));
}

TEST_CASE("a near-duplicate pair fails packing") {
  Eigen::MatrixXd dirs(2, 5);
  dirs << 1, 0, -1, 0, std::cos(0.01), 0, 1, 0, -1, std::sin(0.01);
  const auto report = validate_directions(dirs, 0.9, 1000, 1);
  CHECK_FALSE(report.packing);
  CHECK_FALSE(report.ok());
}

TEST_CASE("one-dimensional net is the two signs") {
  const auto net = DirectionNet::build(1, 0.5, 1);
  REQUIRE(net.size() == 2);
  CHECK(std::abs(net.direction(0)(0)) == 1.0);
  CHECK(net.direction(0)(0) == -net.direction(1)(0));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(DirectionNet::build(0, 0.1, 1), Error);
  CHECK_THROWS_AS(DirectionNet::build(2, 0.0, 1), Error);
  CHECK_THROWS_AS(DirectionNet::build(2, 1.0, 1), Error);
  CHECK_THROWS_AS(DirectionNet::build(2, -0.2, 1), Error);
  try {
    DirectionNet::build(2, 1.5, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("build is deterministic and the ref regenerates the net") {
  const auto a = DirectionNet::build(3, 0.4, 99);
  const auto b = DirectionNet::build(3, 0.4, 99);
  CHECK(a.directions() == b.directions());
  const auto c = net_from_ref(a.ref());
  CHECK(c->directions() == a.directions());
  CHECK(shared_net(3, 0.4, 99).get() == shared_net(3, 0.4, 99).get());
}

TEST_CASE("JSON round trip preserves the directions bit for bit") {
  const auto net = DirectionNet::build(3, 0.5, 4);
  const auto back = net_from_json(to_json(net));
  CHECK(back.directions() == net.directions());
  CHECK(back.eps() == net.eps());
  CHECK(back.seed() == net.seed());
}

TEST_CASE("net functional sandwich holds on random vectors") {
  for (auto [dim, eps] : {std::pair{2, 0.1}, std::pair{3, 0.3}, std::pair{3, 0.5}}) {
    const auto net = DirectionNet::build(dim, eps, 2);
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) {
      const auto x = random_vector(rng, dim);
      const double v = net_functional(x, net);
      CHECK(v <= x.norm() * (1 + 1e-12));
      CHECK(v >= (1.0 - eps) * x.norm() - 1e-12);
    }
  }
}

TEST_CASE("series decomposition converges geometrically") {
  const auto net = DirectionNet::build(3, 0.4, 8);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto theta = rng.direction(3);
    for (int k : {1, 3, 6}) {
      const auto s = series_decompose(theta, net, k);
      CHECK(s.residual_norm <= std::pow(0.4, k + 1) + 1e-12);
      Eigen::VectorXd rebuilt = net.direction(s.indices[0]);
      for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
        CHECK(s.coefficients[j] >= 0.0);
        CHECK(s.coefficients[j] <= std::pow(0.4, static_cast<double>(j + 1)) + 1e-12);
        rebuilt += s.coefficients[j] * net.direction(s.indices[j + 1]);
      }
      CHECK((theta - rebuilt).norm() == doctest::Approx(s.residual_norm).epsilon(1e-9));
    }
  }
}

TEST_CASE("nearest returns the closest direction") {
  const auto net = DirectionNet::build(2, 0.2, 1);
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto theta = rng.direction(2);
    const auto j = net.nearest(theta);
    for (std::size_t k = 0; k < net.size(); ++k)
      CHECK((net.direction(j) - theta).norm() <= (net.direction(k) - theta).norm() + 1e-15);
  }
}
