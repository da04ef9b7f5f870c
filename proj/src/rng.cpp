#include "randpoly/rng.hpp"

#include <cmath>

namespace randpoly {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t stable_hash(const void* data, std::size_t size) noexcept {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Rng::uniform() {
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::gamma(double shape) {
  const bool boost = shape < 1.0;
  const double a = boost ? shape + 1.0 : shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double z, v, u;
  for (;;) {
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    u = uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) break;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) break;
  }
  double result = d * v;
  if (boost) result *= std::pow(uniform(), 1.0 / shape);
  return result;
}

Eigen::VectorXd Rng::direction(int dim) {
  Eigen::VectorXd x(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) x[i] = normal();
    norm = x.norm();
  } while (norm < 1e-300);
  return x / norm;
}

}  // namespace randpoly
