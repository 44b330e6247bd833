#include "spinneedlets/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinneedlets/errors.hpp"

namespace spinneedlets {

namespace {

void require_compatible(const HarmonicCoefficients& a, const HarmonicCoefficients& b) {
  if (a.spin() != b.spin() || a.band_limit() != b.band_limit()) {
    throw UsageError("harmonic coefficients differ in spin or band limit");
  }
}

// e^{i 2 pi q / n} for q in [0, n).
std::vector<Complex> twiddles(int n) {
  std::vector<Complex> table(n);
  for (int q = 0; q < n; ++q) table[q] = std::polar(1.0, 2.0 * kPi * q / n);
  return table;
}

int wrap_index(long long value, int n) {
  long long r = value % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

}  // namespace

HarmonicCoefficients::HarmonicCoefficients(int spin, int band_limit)
    : spin_(spin), band_limit_(band_limit) {
  if (band_limit < 0) throw DomainError("HarmonicCoefficients: negative band limit");
  data_.assign(harmonic_count(band_limit), Complex{});
}

double HarmonicCoefficients::energy() const noexcept {
  double total = 0.0;
  for (const Complex& a : data_) total += std::norm(a);
  return total;
}

int HarmonicCoefficients::effective_band_limit() const noexcept {
  for (int l = band_limit_; l >= 0; --l) {
    for (int m = -l; m <= l; ++m) {
      if ((*this)(l, m) != Complex{}) return l;
    }
  }
  return -1;
}

HarmonicCoefficients HarmonicCoefficients::with_band_limit(int band_limit) const {
  HarmonicCoefficients out(spin_, band_limit);
  const int common = std::min(band_limit, band_limit_);
  for (int l = 0; l <= common; ++l) {
    for (int m = -l; m <= l; ++m) out(l, m) = (*this)(l, m);
  }
  return out;
}

HarmonicCoefficients& HarmonicCoefficients::operator+=(const HarmonicCoefficients& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

HarmonicCoefficients& HarmonicCoefficients::operator-=(const HarmonicCoefficients& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

HarmonicCoefficients& HarmonicCoefficients::operator*=(Complex factor) {
  for (Complex& a : data_) a *= factor;
  return *this;
}

HarmonicCoefficients operator+(HarmonicCoefficients a, const HarmonicCoefficients& b) {
  a += b;
  return a;
}

HarmonicCoefficients operator-(HarmonicCoefficients a, const HarmonicCoefficients& b) {
  a -= b;
  return a;
}

HarmonicCoefficients operator*(Complex factor, HarmonicCoefficients a) {
  a *= factor;
  return a;
}

Complex evaluate(const HarmonicCoefficients& coeffs, const Direction& x) {
  const Direction points[] = {x};
  return evaluate_at_points(coeffs, points).front();
}

std::vector<Complex> evaluate_at_points(const HarmonicCoefficients& coeffs,
                                        std::span<const Direction> points) {
  const int L = coeffs.band_limit();
  std::vector<Complex> out(points.size());
  if (L < 0) return out;
  const SpinHarmonicBasis basis(coeffs.spin(), L);
  std::vector<double> lam(basis.size());
  const auto a = coeffs.data();
  for (std::size_t i = 0; i < points.size(); ++i) {
    basis.evaluate(points[i].theta(), lam);
    const Complex step = std::polar(1.0, points[i].phi());
    // Start at e^{-i L phi} and walk up in m.
    Complex phase = std::polar(1.0, -L * points[i].phi());
    Complex total = 0.0;
    for (int m = -L; m <= L; ++m) {
      double re = 0.0;
      double im = 0.0;
      for (int l = std::abs(m); l <= L; ++l) {
        const std::size_t idx = harmonic_offset(l, m);
        re += a[idx].real() * lam[idx];
        im += a[idx].imag() * lam[idx];
      }
      total += Complex(re, im) * phase;
      phase *= step;
    }
    out[i] = total;
  }
  return out;
}

HarmonicCoefficients adjoint_at_points(std::span<const Direction> points,
                                       std::span<const Complex> values, int spin,
                                       int band_limit) {
  if (points.size() != values.size()) throw UsageError("adjoint_at_points: size mismatch");
  HarmonicCoefficients out(spin, band_limit);
  const int L = band_limit;
  const SpinHarmonicBasis basis(spin, L);
  std::vector<double> lam(basis.size());
  auto acc = out.data();
  for (std::size_t i = 0; i < points.size(); ++i) {
    basis.evaluate(points[i].theta(), lam);
    const Complex step = std::polar(1.0, -points[i].phi());
    Complex z = values[i] * std::polar(1.0, L * points[i].phi());
    for (int m = -L; m <= L; ++m) {
      const double zr = z.real();
      const double zi = z.imag();
      for (int l = std::max(std::abs(m), std::abs(spin)); l <= L; ++l) {
        const std::size_t idx = harmonic_offset(l, m);
        acc[idx] += Complex(lam[idx] * zr, lam[idx] * zi);
      }
      z *= step;
    }
  }
  return out;
}

std::vector<Complex> synthesize_on_grid(const HarmonicCoefficients& coeffs,
                                        const ProductGrid& grid) {
  const int L = coeffs.band_limit();
  const int n_phi = grid.n_phi;
  std::vector<Complex> out(grid.size());
  if (L < 0) return out;
  const SpinHarmonicBasis basis(coeffs.spin(), L);
  const std::vector<Complex> tw = twiddles(n_phi);
  std::vector<double> lam(basis.size());
  std::vector<Complex> g(2 * static_cast<std::size_t>(L) + 1);
  const auto a = coeffs.data();
  for (std::size_t t = 0; t < grid.theta.size(); ++t) {
    basis.evaluate(grid.theta[t], lam);
    for (int m = -L; m <= L; ++m) {
      double re = 0.0;
      double im = 0.0;
      for (int l = std::abs(m); l <= L; ++l) {
        const std::size_t idx = harmonic_offset(l, m);
        re += a[idx].real() * lam[idx];
        im += a[idx].imag() * lam[idx];
      }
      // phi_0 = -pi contributes (-1)^m.
      g[m + L] = (m % 2 == 0) ? Complex(re, im) : Complex(-re, -im);
    }
    Complex* row = out.data() + t * static_cast<std::size_t>(n_phi);
    std::fill(row, row + n_phi, Complex{});
    for (int m = -L; m <= L; ++m) {
      const Complex gm = g[m + L];
      if (gm == Complex{}) continue;
      const int stride = wrap_index(m, n_phi);
      int q = 0;
      for (int j = 0; j < n_phi; ++j) {
        row[j] += gm * tw[q];
        q += stride;
        if (q >= n_phi) q -= n_phi;
      }
    }
  }
  return out;
}

HarmonicCoefficients adjoint_on_grid(std::span<const Complex> values, const ProductGrid& grid,
                                     int spin, int band_limit) {
  if (values.size() != grid.size()) throw UsageError("adjoint_on_grid: size mismatch");
  HarmonicCoefficients out(spin, band_limit);
  const int L = band_limit;
  const int n_phi = grid.n_phi;
  const SpinHarmonicBasis basis(spin, L);
  const std::vector<Complex> tw = twiddles(n_phi);
  std::vector<double> lam(basis.size());
  std::vector<Complex> h(2 * static_cast<std::size_t>(L) + 1);
  auto acc = out.data();
  for (std::size_t t = 0; t < grid.theta.size(); ++t) {
    const Complex* row = values.data() + t * static_cast<std::size_t>(n_phi);
    bool any = false;
    for (int j = 0; j < n_phi && !any; ++j) any = row[j] != Complex{};
    if (!any) continue;
    for (int m = -L; m <= L; ++m) {
      Complex total = 0.0;
      const int stride = wrap_index(-m, n_phi);
      int q = 0;
      for (int j = 0; j < n_phi; ++j) {
        total += row[j] * tw[q];
        q += stride;
        if (q >= n_phi) q -= n_phi;
      }
      h[m + L] = (m % 2 == 0) ? total : -total;
    }
    basis.evaluate(grid.theta[t], lam);
    for (int m = -L; m <= L; ++m) {
      const Complex hm = h[m + L];
      for (int l = std::max(std::abs(m), std::abs(spin)); l <= L; ++l) {
        const std::size_t idx = harmonic_offset(l, m);
        acc[idx] += lam[idx] * hm;
      }
    }
  }
  return out;
}

HarmonicCoefficients project_on_grid(std::span<const Complex> values, const CubatureSet& set,
                                     int spin, int band_limit) {
  if (values.size() != set.size()) throw UsageError("project_on_grid: size mismatch");
  std::vector<Complex> weighted(values.begin(), values.end());
  const auto nodes = set.nodes();
  for (std::size_t k = 0; k < weighted.size(); ++k) weighted[k] *= nodes[k].weight;
  return adjoint_on_grid(weighted, set.grid(), spin, band_limit);
}

double lp_integral_on_grid(std::span<const Complex> values, const CubatureSet& set, double p) {
  if (values.size() != set.size()) throw UsageError("lp_integral_on_grid: size mismatch");
  if (!(p >= 1.0)) throw DomainError("L^p norm needs p >= 1");
  const auto nodes = set.nodes();
  if (std::isinf(p)) {
    double sup = 0.0;
    for (const Complex& v : values) sup = std::max(sup, std::abs(v));
    return sup;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double mod = std::abs(values[k]);
    total += nodes[k].weight * (p == 2.0 ? mod * mod : std::pow(mod, p));
  }
  return total;
}

double section_lp_integral(const HarmonicCoefficients& coeffs, double p, int oversample) {
  if (oversample < 1) throw DomainError("section_lp_integral: oversample must be >= 1");
  const int L = std::max(coeffs.band_limit(), 1);
  const CubatureSet grid = build_cubature(oversample * L);
  const std::vector<Complex> values = synthesize_on_grid(coeffs, grid.grid());
  return lp_integral_on_grid(values, grid, p);
}

double section_lp_norm(const HarmonicCoefficients& coeffs, double p, int oversample) {
  const double integral = section_lp_integral(coeffs, p, oversample);
  return std::isinf(p) ? integral : std::pow(integral, 1.0 / p);
}

}  // namespace spinneedlets
