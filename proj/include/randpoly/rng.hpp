#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace randpoly {

/// SplitMix64 finalizer; used to decorrelate derived stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the independent stream `index` under `master`. Trials and
/// per-direction Monte Carlo draws each get their own stream, so results do
/// not depend on scheduling order.
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) noexcept;

/// FNV-1a over raw bytes; stable across runs (unlike std::hash).
std::uint64_t stable_hash(const void* data, std::size_t size) noexcept;

/// Portable random source. The engine sequence is fixed by the standard and
/// every variate below is generated by code in this library, so a given seed
/// reproduces bit-identical samples on any conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  /// Standard normal, Marsaglia polar method.
  double normal();
  /// Gamma(shape, 1), Marsaglia-Tsang with the shape < 1 boost.
  double gamma(double shape);
  /// Uniform direction on S^{dim-1}.
  Eigen::VectorXd direction(int dim);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace randpoly
