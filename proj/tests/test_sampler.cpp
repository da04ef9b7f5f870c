#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "randpoly/error.hpp"
#include "randpoly/float_bodies.hpp"
#include "randpoly/sampler.hpp"

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

/// Kolmogorov-Smirnov statistic of the projections against a CDF.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// CDF of <X, theta> from tail() on a grid, linearly interpolated.
std::function<double(double)> grid_cdf(const DensityND& d, const Eigen::VectorXd& theta, double lo, double hi) {
  const int m = 200;
  auto ts = std::make_shared<std::vector<double>>();
  auto cs = std::make_shared<std::vector<double>>();
  for (int i = 0; i <= m; ++i) {
    const double t = lo + (hi - lo) * i / m;
    ts->push_back(t);
    cs->push_back(1.0 - tail(d, theta, t));
  }
  return [ts, cs](double t) {
    if (t <= ts->front()) return cs->front();
    if (t >= ts->back()) return cs->back();
    const auto it = std::upper_bound(ts->begin(), ts->end(), t);
    const std::size_t j = static_cast<std::size_t>(it - ts->begin());
    const double w = (t - (*ts)[j - 1]) / ((*ts)[j] - (*ts)[j - 1]);
    return (1.0 - w) * (*cs)[j - 1] + w * (*cs)[j];
  };
}

std::vector<double> projections(const SampleSet& s, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd p = s.points.transpose() * theta;
  return {p.data(), p.data() + p.size()};
}

}  // namespace

TEST_CASE("moments") {
  const std::size_t n = 100000;
  const auto g = sample(DensityND::gaussian(3), n, 1);
  const Eigen::VectorXd mean = g.points.rowwise().mean();
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean(i)) <= 3.0 / std::sqrt(static_cast<double>(n)));

  const auto sz2 = sample(DensityND::schechtman_zinn(2, 2.0), n, 2);
  const double m2 = sz2.points.row(0).array().square().mean();
  CHECK(std::abs(m2 - 0.5) <= 3.0 * std::sqrt(0.5 / n));

  const auto sz1 = sample(DensityND::schechtman_zinn(2, 1.0), n, 3);
  const double m1 = sz1.points.row(1).array().abs().mean();
  CHECK(std::abs(m1 - 1.0) <= 3.0 * std::sqrt(1.0 / n));
}

TEST_CASE("sampling is reproducible") {
  const auto d = DensityND::radial_exp_power(2, 1.0);
  const auto a = sample(d, 1000, 42);
  const auto b = sample(d, 1000, 42);
  const auto c = sample(d, 1000, 43);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  CHECK(a.density_ref == d.ref());
}

TEST_CASE("marginals pass a Kolmogorov-Smirnov test") {
  const std::size_t n = 10000;
  const double crit = 1.628 / std::sqrt(static_cast<double>(n));  // 1% level
  std::vector<DensityND> dens{DensityND::gaussian(2), DensityND::schechtman_zinn(2, 1.0),
                              DensityND::schechtman_zinn(3, 4.0), DensityND::radial_exp_power(2, 1.0),
                              DensityND::product({Density1D::exp_power(1.5), Density1D::gaussian()}),
                              DensityND::general(
                                  2, "laplace-like",
                                  [](const Point& x) { return x.norm() + std::log(2.0 * M_PI); },
                                  (Point(2) << 0.1, 0.1).finished(), Envelope{1.0, std::log(2.0 * M_PI)})};
  Rng rng(5);
  int k = 0;
  for (const auto& d : dens) {
    const auto s = sample(d, n, 100 + k++);
    for (int j = 0; j < 3; ++j) {
      const Eigen::VectorXd th = rng.direction(d.dim());
      const auto x = projections(s, th);
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      const double ks = ks_statistic(x, grid_cdf(d, th, *lo, *hi));
      CHECK_MESSAGE(ks <= crit, d.ref());
    }
  }

  const planar::Polygon poly{{0, 0}, {3, 0}, {4, 1}, {2, 2}, {-0.5, 1}};
  const double area = planar::signed_area(poly);
  const auto s = sample(DensityND::uniform_polygon(poly), n, 9);
  for (int j = 0; j < 3; ++j) {
    const Eigen::Vector2d th = rng.direction(2);
    const double ks =
        ks_statistic(projections(s, th), [&](double t) { return 1.0 - cap_area(poly, th, t) / area; });
    CHECK(ks <= crit);
  }
}

TEST_CASE("random polytope basics") {
  const auto net = shared_net(2, 0.1, 1);
  SampleSet tri;
  tri.dim = 2;
  tri.n = 3;
  tri.points.resize(2, 3);
  tri.points << 0, 1, 0, 0, 0, 1;
  const auto body = random_polytope(tri, net);
  CHECK(body.center().isApprox((Point(2) << 1.0 / 3.0, 1.0 / 3.0).finished()));
  CHECK(area_2d(body) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(vertex_count_2d(tri) == 3);

  SampleSet same = tri;
  same.points.setConstant(0.25);
  CHECK_FALSE(random_polytope(same, net).center_interior());

  SampleSet two = tri;
  two.n = 2;
  two.points = tri.points.leftCols(2);
  CHECK(kind_of([&] { random_polytope(two, net); }) == ErrorKind::DegenerateHull);
  CHECK(kind_of([&] { vertex_count_2d(two); }) == ErrorKind::DegenerateHull);

  SampleSet four = tri;
  four.n = 4;
  four.points.resize(2, 4);
  four.points << 0, 1, 0, 0.2, 0, 0, 1, 0.2;
  CHECK(vertex_count_2d(four) == 3);
}

TEST_CASE("prefiltered supports equal brute force") {
  for (int dim : {2, 3}) {
    const auto net = shared_net(dim, dim == 2 ? 0.1 : 0.3, 1);
    const auto d = dim == 2 ? DensityND::gaussian(2) : DensityND::schechtman_zinn(3, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = sample(d, 20000, derive_stream(77, static_cast<std::uint64_t>(trial)));
      PrefilterStats stats;
      const auto fast = random_polytope(s, net, &stats);
      const auto slow = random_polytope_brute_force(s, net);
      CHECK(fast.values() == slow.values());
      CHECK(stats.verified);
      CHECK(stats.kept + stats.discarded == s.n);
    }
  }
}

TEST_CASE("support values land in the maximum interval at the predicted rate") {
  const auto net = shared_net(2, 0.1, 1);
  const long long n = 10000;
  const auto r = max_concentration_interval(Density1D::gaussian(), n, 1.0);
  const int trials = 400;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const auto s = sample(DensityND::gaussian(2), static_cast<std::size_t>(n), derive_stream(5, t));
    const auto body = support_of_points(s.points, net, Point::Zero(2));
    const double h = body.value(static_cast<std::size_t>(t) % net->size());
    hits += (h >= r.lo && h <= r.hi);
  }
  const double freq = static_cast<double>(hits) / trials;
  CHECK(std::abs(freq - r.prob) <= 3.0 * std::sqrt(r.prob * (1.0 - r.prob) / trials));
}

TEST_CASE("samples serialise with a sidecar") {
  const auto s = sample(DensityND::gaussian(2), 16, 3);
  const auto path = (std::filesystem::temp_directory_path() / "randpoly_samples.bin").string();
  write_samples(s, path);
  std::ifstream in(path, std::ios::binary);
  std::vector<double> buf(32);
  in.read(reinterpret_cast<char*>(buf.data()), 32 * sizeof(double));
  CHECK(in.gcount() == 32 * static_cast<std::streamsize>(sizeof(double)));
  CHECK(buf[0] == s.points(0, 0));
  CHECK(buf[3] == s.points(1, 1));
  CHECK(std::filesystem::exists(path + ".json"));
}
