#include "spinneedlets/sphere_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "spinneedlets/errors.hpp"

namespace spinneedlets {

namespace {

constexpr double kFourPi = 4.0 * kPi;
// Seeds below exp(-700) are flushed to zero; the recursion can only recover
// O(1) values from them once l*sin(theta) exceeds |m|, far beyond any band
// limit we tabulate.
constexpr double kLogUnderflow = -700.0;

// Closed-form d^j_{m1,m2} at j = max(|m1|, |m2|), where the explicit Wigner
// sum has a single term. Returned as log-magnitude, sign and half-angle powers.
struct Seed {
  int l = 0;
  double log_scale = 0.0;
  double sign = 1.0;
  int cos_power = 0;
  int sin_power = 0;
};

Seed wigner_seed(int m1, int m2) {
  Seed seed;
  const int j = std::max(std::abs(m1), std::abs(m2));
  seed.l = j;
  const int k = std::max(0, m2 - m1);
  const double numerator = 0.5 * (std::lgamma(j + m2 + 1.0) + std::lgamma(j - m2 + 1.0) +
                                  std::lgamma(j + m1 + 1.0) + std::lgamma(j - m1 + 1.0));
  const double denominator = std::lgamma(j + m2 - k + 1.0) + std::lgamma(k + 1.0) +
                             std::lgamma(j - k - m1 + 1.0) + std::lgamma(k - m2 + m1 + 1.0);
  seed.log_scale = numerator - denominator;
  seed.sign = ((k - m2 + m1) % 2 == 0) ? 1.0 : -1.0;
  seed.cos_power = 2 * j - 2 * k + m2 - m1;
  seed.sin_power = 2 * k - m2 + m1;
  return seed;
}

double seed_value(double log_scale, double sign, int cos_power, int sin_power,
                  double log_cos_half, double log_sin_half) {
  double log_value = log_scale;
  if (cos_power != 0) log_value += cos_power * log_cos_half;
  if (sin_power != 0) log_value += sin_power * log_sin_half;
  if (log_value < kLogUnderflow) return 0.0;
  return sign * std::exp(log_value);
}

struct Step {
  double a, b, c;
};

Step recursion_step(int l, int m1, int m2) {
  const double lp1 = l + 1.0;
  const double den = std::sqrt((lp1 * lp1 - m1 * m1) * (lp1 * lp1 - m2 * m2));
  Step step{lp1 * (2.0 * l + 1.0) / den, 0.0, 0.0};
  if (l > 0) {
    step.b = step.a * m1 * m2 / (l * lp1);
    const double ll = static_cast<double>(l) * l;
    step.c = lp1 * std::sqrt((ll - m1 * m1) * (ll - m2 * m2)) / (l * den);
  }
  return step;
}

double parity(int n) { return (std::abs(n) % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

Direction::Direction(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi) || !(theta > 0.0) || !(theta < kPi)) {
    throw DomainError("Direction: colatitude must lie strictly inside (0, pi), got " +
                      std::to_string(theta));
  }
  theta_ = theta;
  double wrapped = std::fmod(phi + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  wrapped -= kPi;
  if (wrapped >= kPi) wrapped = -kPi;
  phi_ = wrapped;
}

Direction::Cartesian Direction::unit_vector() const noexcept {
  const double st = std::sin(theta_);
  return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
}

double geodesic_distance(const Direction& a, const Direction& b) noexcept {
  const auto u = a.unit_vector();
  const auto v = b.unit_vector();
  const double dot = std::clamp(u.x * v.x + u.y * v.y + u.z * v.z, -1.0, 1.0);
  return std::acos(dot);
}

double clamp_colatitude(double theta) noexcept {
  return std::clamp(theta, 1e-9, kPi - 1e-9);
}

void validate(const HarmonicIndex& idx) {
  if (idx.l < 0 || std::abs(idx.m) > idx.l || idx.l < std::abs(idx.s)) {
    throw DomainError("invalid harmonic index (l=" + std::to_string(idx.l) +
                      ", m=" + std::to_string(idx.m) + ", s=" + std::to_string(idx.s) + ")");
  }
}

double legendre_assoc(int l, int m, double x) {
  if (m < 0 || m > l || !(std::abs(x) <= 1.0)) {
    throw DomainError("legendre_assoc: need 0 <= m <= l and |x| <= 1");
  }
  const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= (2.0 * k - 1.0) * somx2;
  if (l == m) return pmm;
  double pmm1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmm1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = ((2.0 * ll - 1.0) * x * pmm1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmm1;
    pmm1 = pll;
  }
  return pll;
}

Complex ylm(int l, int m, const Direction& dir) {
  validate({l, m, 0});
  if (m < 0) return parity(m) * std::conj(ylm(l, -m, dir));

  const double x = std::cos(dir.theta());
  const double st = std::sin(dir.theta());
  // Orthonormalised recursion: P(l,m) = sqrt((2l+1)/4pi (l-m)!/(l+m)!) P_lm(x).
  double pmm = std::sqrt((2.0 * m + 1.0) / kFourPi);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k - 1.0) / (2.0 * k)) * st;
  double value = pmm;
  if (l > m) {
    double prev = pmm;
    double cur = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int ll = m + 2; ll <= l; ++ll) {
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (static_cast<double>(ll) * ll - m * m));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - m * m) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double next = a * (x * cur - b * prev);
      prev = cur;
      cur = next;
    }
    value = cur;
  }
  return value * std::polar(1.0, m * dir.phi());
}

double eigenvalue_spin(int l, int s) {
  if (l < std::abs(s)) {
    throw DomainError("eigenvalue_spin: need l >= |s|");
  }
  return static_cast<double>(l - s) * static_cast<double>(l + s + 1);
}

double wigner_d(int l, int m1, int m2, double beta) {
  if (l < std::max(std::abs(m1), std::abs(m2))) {
    throw DomainError("wigner_d: need l >= max(|m1|, |m2|)");
  }
  const Seed seed = wigner_seed(m1, m2);
  double cur = seed_value(seed.log_scale, seed.sign, seed.cos_power, seed.sin_power,
                          std::log(std::cos(0.5 * beta)), std::log(std::sin(0.5 * beta)));
  double prev = 0.0;
  const double x = std::cos(beta);
  for (int ll = seed.l; ll < l; ++ll) {
    const Step step = recursion_step(ll, m1, m2);
    const double next = (step.a * x - step.b) * cur - step.c * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Complex spin_ylm(const HarmonicIndex& idx, const Direction& dir) {
  validate(idx);
  if (idx.s == 0) return ylm(idx.l, idx.m, dir);
  const double d = wigner_d(idx.l, idx.m, -idx.s, dir.theta());
  const double norm = std::sqrt((2.0 * idx.l + 1.0) / kFourPi);
  return parity(idx.m + idx.s) * norm * d * std::polar(1.0, idx.m * dir.phi());
}

SpinHarmonicBasis::SpinHarmonicBasis(int spin, int band_limit)
    : spin_(spin), band_limit_(band_limit) {
  if (band_limit < 0) throw DomainError("SpinHarmonicBasis: negative band limit");
  orders_.resize(2 * static_cast<std::size_t>(band_limit) + 1);
  for (int m = -band_limit; m <= band_limit; ++m) {
    OrderTable& table = orders_[m + band_limit];
    const Seed seed = wigner_seed(m, -spin);
    table.l_min = seed.l;
    table.log_seed_scale = seed.log_scale;
    table.seed_sign = seed.sign * parity(m + spin);
    table.cos_power = seed.cos_power;
    table.sin_power = seed.sin_power;
    for (int l = seed.l; l < band_limit; ++l) {
      const Step step = recursion_step(l, m, -spin);
      table.a.push_back(step.a);
      table.b.push_back(step.b);
      table.c.push_back(step.c);
    }
  }
  norm_.resize(band_limit + 1);
  for (int l = 0; l <= band_limit; ++l) norm_[l] = std::sqrt((2.0 * l + 1.0) / kFourPi);
}

void SpinHarmonicBasis::evaluate(double theta, std::span<double> out) const {
  if (out.size() != size()) throw UsageError("SpinHarmonicBasis::evaluate: output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const double x = std::cos(theta);
  const double log_cos_half = std::log(std::cos(0.5 * theta));
  const double log_sin_half = std::log(std::sin(0.5 * theta));
  const int L = band_limit_;
  for (int m = -L; m <= L; ++m) {
    const OrderTable& table = orders_[m + L];
    if (table.l_min > L) continue;
    double cur = seed_value(table.log_seed_scale, table.seed_sign, table.cos_power,
                            table.sin_power, log_cos_half, log_sin_half);
    if (cur == 0.0) continue;
    double prev = 0.0;
    out[harmonic_offset(table.l_min, m)] = norm_[table.l_min] * cur;
    for (int l = table.l_min; l < L; ++l) {
      const std::size_t i = static_cast<std::size_t>(l - table.l_min);
      const double next = (table.a[i] * x - table.b[i]) * cur - table.c[i] * prev;
      prev = cur;
      cur = next;
      out[harmonic_offset(l + 1, m)] = norm_[l + 1] * cur;
    }
  }
}

ThetaPhiGrid ThetaPhiGrid::regular(int n_theta, int n_phi, double theta_min, double theta_max) {
  if (n_theta < 3 || n_phi < 3) throw DomainError("ThetaPhiGrid: need at least 3 rows and columns");
  if (!(theta_min > 0.0) || !(theta_max < kPi) || !(theta_max > theta_min)) {
    throw DomainError("ThetaPhiGrid: rows must stay strictly between the poles");
  }
  return {theta_min, (theta_max - theta_min) / (n_theta - 1), n_theta, n_phi};
}

GridField sample_spin_ylm(const HarmonicIndex& idx, const ThetaPhiGrid& grid) {
  validate(idx);
  GridField field{grid, std::vector<Complex>(grid.size())};
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int j = 0; j < grid.n_phi; ++j) {
      field.at(i, j) = spin_ylm(idx, Direction(grid.theta(i), grid.phi(j)));
    }
  }
  return field;
}

GridField apply_eth(const GridField& field, int spin, bool raise) {
  const ThetaPhiGrid& grid = field.grid;
  if (field.values.size() != grid.size()) throw UsageError("apply_eth: field/grid size mismatch");
  if (grid.n_theta < 3 || grid.n_phi < 3) throw DomainError("apply_eth: grid too small");
  if (!(grid.theta(0) > 0.0) || !(grid.theta(grid.n_theta - 1) < kPi)) {
    throw DomainError("apply_eth: grid touches a pole");
  }
  const int inner_power = raise ? -spin : spin;
  const double phi_sign = raise ? 1.0 : -1.0;

  GridField scaled = field;
  for (int i = 0; i < grid.n_theta; ++i) {
    const double factor = std::pow(std::sin(grid.theta(i)), inner_power);
    for (int j = 0; j < grid.n_phi; ++j) scaled.at(i, j) *= factor;
  }

  const double h = grid.theta_step;
  const double dphi = 2.0 * kPi / grid.n_phi;
  const int last = grid.n_theta - 1;
  GridField out{grid, std::vector<Complex>(grid.size())};
  for (int i = 0; i < grid.n_theta; ++i) {
    const double st = std::sin(grid.theta(i));
    const double outer = -std::pow(st, -inner_power);
    for (int j = 0; j < grid.n_phi; ++j) {
      Complex d_theta;
      if (i == 0) {
        d_theta = (-3.0 * scaled.at(0, j) + 4.0 * scaled.at(1, j) - scaled.at(2, j)) / (2.0 * h);
      } else if (i == last) {
        d_theta = (3.0 * scaled.at(last, j) - 4.0 * scaled.at(last - 1, j) +
                   scaled.at(last - 2, j)) / (2.0 * h);
      } else {
        d_theta = (scaled.at(i + 1, j) - scaled.at(i - 1, j)) / (2.0 * h);
      }
      const int jp = (j + 1) % grid.n_phi;
      const int jm = (j + grid.n_phi - 1) % grid.n_phi;
      const Complex d_phi = (scaled.at(i, jp) - scaled.at(i, jm)) / (2.0 * dphi);
      out.at(i, j) = outer * (d_theta + Complex(0.0, phi_sign / st) * d_phi);
    }
  }
  return out;
}

}  // namespace spinneedlets
