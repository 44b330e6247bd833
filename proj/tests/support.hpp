#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spinneedlets/sphere_core.hpp"
#include "spinneedlets/transforms.hpp"

namespace testing_support {

using spinneedlets::Complex;
using spinneedlets::Direction;
using spinneedlets::HarmonicCoefficients;

// Complex Gaussian coefficients on lmin <= l <= L.
inline HarmonicCoefficients random_section(int spin, int band_limit, std::uint64_t seed,
                                           int lmin = -1) {
  if (lmin < 0) lmin = spin + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  HarmonicCoefficients a(spin, band_limit);
  for (int l = lmin; l <= band_limit; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double re = gauss(rng);
      a(l, m) = Complex(re, gauss(rng));
    }
  }
  return a;
}

inline std::vector<Direction> random_directions(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  std::uniform_real_distribution<double> phi(-spinneedlets::kPi, spinneedlets::kPi);
  std::vector<Direction> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::acos(u(rng));
    out.emplace_back(t, phi(rng));
  }
  return out;
}

}  // namespace testing_support
