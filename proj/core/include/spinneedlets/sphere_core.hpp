#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spinneedlets {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Point on the sphere in the standard chart (poles excluded).
class Direction {
 public:
  // theta must lie strictly inside (0, pi); phi is wrapped into [-pi, pi).
  Direction(double theta, double phi);

  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }

  struct Cartesian {
    double x, y, z;
  };
  Cartesian unit_vector() const noexcept;

 private:
  double theta_;
  double phi_;
};

// Great-circle distance arccos<a, b>.
double geodesic_distance(const Direction& a, const Direction& b) noexcept;

// Clamp a colatitude into the open chart, for callers that need near-pole values.
double clamp_colatitude(double theta) noexcept;

struct HarmonicIndex {
  int l = 0;
  int m = 0;
  int s = 0;
};

// Throws DomainError unless |m| <= l and l >= |s|.
void validate(const HarmonicIndex& idx);

// Flat position of (l, m) in a degree-major coefficient array: l*l + l + m.
constexpr std::size_t harmonic_offset(int l, int m) noexcept {
  return static_cast<std::size_t>(l * l + l + m);
}
constexpr std::size_t harmonic_count(int band_limit) noexcept {
  return static_cast<std::size_t>((band_limit + 1) * (band_limit + 1));
}

// Associated Legendre function (1-x^2)^{m/2} d^m/dx^m P_l(x), without the
// Condon-Shortley phase. Requires 0 <= m <= l and |x| <= 1.
double legendre_assoc(int l, int m, double x);

// Scalar harmonic with the same phase convention as legendre_assoc.
// Negative orders use Y_{l,-m} = (-1)^m conj(Y_{lm}).
Complex ylm(int l, int m, const Direction& dir);

// e_{ls} = (l - s)(l + s + 1), the eigenvalue of -eth_bar eth on spin-s harmonics.
double eigenvalue_spin(int l, int s);

// Spin-weighted harmonic Y_{lm;s}, orthonormal on the sphere.
//
// Phase: Y_{lm;s} = (-1)^{m+s} sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{im phi},
// which equals ylm at s = 0 and satisfies
//   eth     Y_{lm;s} =  sqrt((l-s)(l+s+1)) Y_{lm;s+1},
//   eth_bar Y_{lm;s} = -sqrt((l+s)(l-s+1)) Y_{lm;s-1}.
// For s = 0 the call is forwarded to ylm so the two agree bit for bit.
Complex spin_ylm(const HarmonicIndex& idx, const Direction& dir);

// Wigner small-d element d^l_{m1,m2}(beta), computed by upward recursion in l
// from l = max(|m1|, |m2|).
double wigner_d(int l, int m1, int m2, double beta);

// Recursion tables for the theta part of Y_{lm;s} for every |m| <= l <= L.
// Immutable after construction, so one instance can be shared across threads.
class SpinHarmonicBasis {
 public:
  SpinHarmonicBasis(int spin, int band_limit);

  int spin() const noexcept { return spin_; }
  int band_limit() const noexcept { return band_limit_; }
  std::size_t size() const noexcept { return harmonic_count(band_limit_); }

  // Fills out[harmonic_offset(l, m)] with Y_{lm;s}(theta, 0); entries with
  // l < |s| are zero. out.size() must equal size().
  void evaluate(double theta, std::span<double> out) const;

 private:
  struct OrderTable {
    int l_min = 0;
    double log_seed_scale = 0.0;
    int cos_power = 0;
    int sin_power = 0;
    double seed_sign = 1.0;
    // Per step l -> l+1 (index l - l_min): d_{l+1} = (a cos - b) d_l - c d_{l-1}.
    std::vector<double> a, b, c;
  };

  int spin_;
  int band_limit_;
  std::vector<OrderTable> orders_;  // index m + band_limit
  std::vector<double> norm_;        // sqrt((2l+1)/4pi)
};

// Regular theta-phi grid away from the poles. Rows are colatitudes
// theta_min + i*h; columns are phi_j = -pi + 2 pi j / n_phi.
struct ThetaPhiGrid {
  double theta_min = 0.0;
  double theta_step = 0.0;
  int n_theta = 0;
  int n_phi = 0;

  static ThetaPhiGrid regular(int n_theta, int n_phi, double theta_min, double theta_max);
  double theta(int i) const noexcept { return theta_min + theta_step * i; }
  double phi(int j) const noexcept { return -kPi + 2.0 * kPi * j / n_phi; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi);
  }
};

// Samples of a field on a ThetaPhiGrid, row-major in theta.
struct GridField {
  ThetaPhiGrid grid;
  std::vector<Complex> values;

  Complex& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n_phi + j]; }
  const Complex& at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * grid.n_phi + j];
  }
};

// Samples Y_{lm;s} on every node of a grid.
GridField sample_spin_ylm(const HarmonicIndex& idx, const ThetaPhiGrid& grid);

// Finite-difference eth (raise = true) or eth_bar (raise = false) of a spin-s
// field. Central differences in theta (second-order one-sided on the first and
// last rows) and periodic central differences in phi; error is O(h^2).
GridField apply_eth(const GridField& field, int spin, bool raise);

}  // namespace spinneedlets
