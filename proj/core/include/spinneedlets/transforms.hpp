#pragma once

#include <span>
#include <vector>

#include "spinneedlets/quadrature.hpp"
#include "spinneedlets/sphere_core.hpp"

namespace spinneedlets {

// Band-limited spin-s section as harmonic coefficients a_{lm;s}, l <= L.
class HarmonicCoefficients {
 public:
  HarmonicCoefficients() = default;
  HarmonicCoefficients(int spin, int band_limit);

  int spin() const noexcept { return spin_; }
  int band_limit() const noexcept { return band_limit_; }

  Complex& operator()(int l, int m) { return data_[harmonic_offset(l, m)]; }
  Complex operator()(int l, int m) const { return data_[harmonic_offset(l, m)]; }
  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  // Sum |a_lm|^2, the squared L2 norm of the section.
  double energy() const noexcept;
  // Largest l carrying a nonzero coefficient, or -1 for the zero section.
  int effective_band_limit() const noexcept;
  // Copy truncated or zero-padded to a new band limit.
  HarmonicCoefficients with_band_limit(int band_limit) const;

  HarmonicCoefficients& operator+=(const HarmonicCoefficients& other);
  HarmonicCoefficients& operator-=(const HarmonicCoefficients& other);
  HarmonicCoefficients& operator*=(Complex factor);

 private:
  int spin_ = 0;
  int band_limit_ = -1;
  std::vector<Complex> data_;
};

HarmonicCoefficients operator+(HarmonicCoefficients a, const HarmonicCoefficients& b);
HarmonicCoefficients operator-(HarmonicCoefficients a, const HarmonicCoefficients& b);
HarmonicCoefficients operator*(Complex factor, HarmonicCoefficients a);

// Sum_lm a_lm Y_{lm;s}(x) at one point.
Complex evaluate(const HarmonicCoefficients& coeffs, const Direction& x);

// Same at many points; the spin basis is built once.
std::vector<Complex> evaluate_at_points(const HarmonicCoefficients& coeffs,
                                        std::span<const Direction> points);

// Sum_i values_i conj(Y_{lm;s}(x_i)) for l <= band_limit.
HarmonicCoefficients adjoint_at_points(std::span<const Direction> points,
                                       std::span<const Complex> values, int spin,
                                       int band_limit);

// Values of the section on every node of a product grid, ring by ring.
std::vector<Complex> synthesize_on_grid(const HarmonicCoefficients& coeffs,
                                        const ProductGrid& grid);

// Sum_k values_k conj(Y_{lm;s}(xi_k)) over the nodes of a product grid.
HarmonicCoefficients adjoint_on_grid(std::span<const Complex> values, const ProductGrid& grid,
                                     int spin, int band_limit);

// Harmonic coefficients of a sampled section: adjoint of weight * values.
HarmonicCoefficients project_on_grid(std::span<const Complex> values, const CubatureSet& set,
                                     int spin, int band_limit);

// Dense-grid L^p norm of a band-limited section: (int |F|^p)^{1/p}, or the grid
// supremum for p = inf. The grid is a product rule of degree oversample * L.
double section_lp_norm(const HarmonicCoefficients& coeffs, double p, int oversample = 2);

// int |F|^p over the same grid (no root); the supremum for p = inf.
double section_lp_integral(const HarmonicCoefficients& coeffs, double p, int oversample = 2);

// Sum_k w_k |values_k|^p, or max |values_k| for p = inf.
double lp_integral_on_grid(std::span<const Complex> values, const CubatureSet& set, double p);

}  // namespace spinneedlets
