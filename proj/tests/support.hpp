#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "srgeo/sl2.hpp"

namespace srgeo::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  Momentum covector(double scale = 2.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
  }

  /// Point of the unit co-sphere xi^2 + eta^2 = 1.
  Momentum unit_covector(double zeta_max = 3.0) {
    const double th = uniform(0.0, 2.0 * std::numbers::pi);
    return {std::cos(th), std::sin(th), uniform(-zeta_max, zeta_max)};
  }

  /// Unit co-sphere point with Casimir value c, at a random angle admissible
  /// on that level.
  Momentum on_level(double c) {
    for (;;) {
      const double th = uniform(0.0, 2.0 * std::numbers::pi);
      const double z2 = 2.0 * (c - std::sin(2.0 * th));
      if (z2 < 0.0) continue;
      const double z = (integer(0, 1) ? 1.0 : -1.0) * std::sqrt(z2);
      return {std::cos(th), std::sin(th), z};
    }
  }

  Algebra algebra(double scale = 2.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
  }

  Psl2 group(double scale = 1.5) {
    for (;;) {
      Mat2 m;
      m << uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale),
          uniform(-scale, scale);
      if (m.determinant() > 0.2) return Psl2(m);
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace srgeo::testing
