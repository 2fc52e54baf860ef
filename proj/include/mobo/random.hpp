#pragma once

// Deterministic random streams and low-discrepancy point sets.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "mobo/core.hpp"

namespace mobo {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the stream identified by (seed, tags...). Streams for distinct
/// tag tuples are statistically independent and schedule-free.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed);
  for (auto t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform double stream. Uses its own bit-to-double mapping so results do
/// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Vector uniform_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform();
    return v;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Randomly shifted Halton sequence on [0,1)^dim (dim <= 32).
/// The shift is drawn once from `seed` (Cranley-Patterson rotation).
class Halton {
 public:
  Halton(Eigen::Index dim, std::uint64_t seed, std::uint64_t skip = 1) : dim_(dim), index_(skip) {
    if (dim < 1 || dim > static_cast<Eigen::Index>(kPrimes.size())) {
      throw ContractError("Halton: dimension must be in [1, 32]");
    }
    Rng rng(derive_seed(seed, {0x4a17}));
    shift_ = rng.uniform_vector(dim);
  }

  Vector next() {
    Vector p(dim_);
    for (Eigen::Index d = 0; d < dim_; ++d) {
      const double v = radical_inverse(index_, kPrimes[static_cast<std::size_t>(d)]) + shift_(d);
      p(d) = v - std::floor(v);
    }
    ++index_;
    return p;
  }

  /// n x dim matrix of consecutive points.
  Matrix take(Eigen::Index n) {
    Matrix out(n, dim_);
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) = next().transpose();
    return out;
  }

 private:
  static double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (i > 0) {
      r += f * static_cast<double>(i % base);
      i /= base;
      f *= inv;
    }
    return r;
  }

  static constexpr std::array<std::uint64_t, 32> kPrimes = {
      2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43,  47,  53,
      59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

  Eigen::Index dim_;
  std::uint64_t index_;
  Vector shift_;
};

}  // namespace mobo
