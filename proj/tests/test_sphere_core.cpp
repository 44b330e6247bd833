#include <doctest.h>

#include <cmath>
#include <vector>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/sphere_core.hpp"
#include "support.hpp"

using namespace spinneedlets;

namespace {

long double factorial(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Explicit finite sum for d^j_{m'm}(beta).
double wigner_d_explicit(int j, int mp, int m, double beta) {
  const long double c = std::cos(beta / 2.0L);
  const long double s = std::sin(beta / 2.0L);
  const long double pref = std::sqrt(factorial(j + mp) * factorial(j - mp) * factorial(j + m) *
                                     factorial(j - m));
  long double total = 0.0L;
  for (int k = 0; k <= 2 * j; ++k) {
    if (j + m - k < 0 || j - k - mp < 0 || k - m + mp < 0) continue;
    const long double den =
        factorial(j + m - k) * factorial(k) * factorial(j - k - mp) * factorial(k - m + mp);
    const long double sign = ((k - m + mp) % 2 == 0) ? 1.0L : -1.0L;
    total += sign * pref / den * std::pow(c, 2 * j - 2 * k + m - mp) * std::pow(s, 2 * k - m + mp);
  }
  return static_cast<double>(total);
}

Complex goldberg(int l, int m, int s, const Direction& x) {
  const double sign = ((m + s) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::sqrt((2 * l + 1) / (4 * kPi)) * wigner_d_explicit(l, m, -s, x.theta()) *
         std::polar(1.0, m * x.phi());
}

// Compares rows at least 0.1 rad inside the grid, so the one-sided boundary
// stencils do not mask the interior convergence order.
double max_abs_diff(const GridField& a, const GridField& b, double scale = 1.0) {
  const ThetaPhiGrid& g = a.grid;
  const double lo = g.theta(0) + 0.1;
  const double hi = g.theta(g.n_theta - 1) - 0.1;
  double worst = 0.0;
  for (int i = 0; i < g.n_theta; ++i) {
    if (g.theta(i) < lo - 1e-12 || g.theta(i) > hi + 1e-12) continue;
    for (int j = 0; j < g.n_phi; ++j) worst = std::max(worst, std::abs(a.at(i, j) - scale * b.at(i, j)));
  }
  return worst;
}

}  // namespace

TEST_CASE("direction keeps theta off the poles and wraps phi") {
  CHECK_THROWS_AS(Direction(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(Direction(kPi, 0.0), DomainError);
  CHECK_THROWS_AS(Direction(NAN, 0.0), DomainError);
  const Direction d(1.0, 3.5 * kPi);
  CHECK(d.phi() >= -kPi);
  CHECK(d.phi() < kPi);
  CHECK(d.phi() == doctest::Approx(-0.5 * kPi).epsilon(1e-14));
  CHECK(Direction(1.0, kPi).phi() == doctest::Approx(-kPi));
  CHECK(clamp_colatitude(0.0) == 1e-9);
  CHECK(clamp_colatitude(kPi) == kPi - 1e-9);
  const Direction a(0.5, 0.0);
  const Direction b(0.5 + 0.25, 0.0);
  CHECK(geodesic_distance(a, b) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("associated Legendre functions without the Condon-Shortley phase") {
  CHECK(legendre_assoc(0, 0, 0.3) == doctest::Approx(1.0));
  CHECK(legendre_assoc(1, 1, 0.0) == doctest::Approx(1.0));
  // (1 - x^2)^{1/2} * 3x at x = 0.5.
  CHECK(legendre_assoc(2, 1, 0.5) == doctest::Approx(std::sqrt(0.75) * 1.5).epsilon(1e-14));
  CHECK(legendre_assoc(3, 2, 0.2) == doctest::Approx(15.0 * 0.2 * (1 - 0.04)).epsilon(1e-13));
  CHECK_THROWS_AS(legendre_assoc(2, 3, 0.1), DomainError);
  CHECK_THROWS_AS(legendre_assoc(2, -1, 0.1), DomainError);
  CHECK_THROWS_AS(legendre_assoc(2, 1, 1.5), DomainError);
}

TEST_CASE("scalar harmonics: closed forms and conjugation symmetry") {
  const Direction x(0.9, -1.2);
  CHECK(std::abs(ylm(0, 0, x) - 1.0 / std::sqrt(4 * kPi)) < 1e-15);
  CHECK(std::abs(ylm(1, 0, Direction(kPi / 2, 0.4))) < 1e-15);
  CHECK(ylm(1, 1, Direction(kPi / 2, 0.0)).real() == doctest::Approx(std::sqrt(3.0 / (8 * kPi))));
  CHECK(ylm(1, 1, Direction(kPi / 2, 0.0)).real() == doctest::Approx(0.345494).epsilon(1e-6));
  CHECK(ylm(2, 1, Direction(0.4, 0.0)).real() == doctest::Approx(0.277096151578688).epsilon(1e-13));
  for (const Direction& d : testing_support::random_directions(20, 3)) {
    for (int l = 0; l <= 12; ++l) {
      for (int m = 1; m <= l; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(ylm(l, -m, d) - sign * std::conj(ylm(l, m, d))) < 1e-14);
      }
    }
  }
  CHECK_THROWS_AS(ylm(2, 3, x), DomainError);
}

TEST_CASE("spin eigenvalues") {
  CHECK(eigenvalue_spin(2, 2) == 0.0);
  CHECK(eigenvalue_spin(3, 2) == 6.0);
  CHECK(eigenvalue_spin(10, 0) == 110.0);
  CHECK_THROWS_AS(eigenvalue_spin(1, 2), DomainError);
}

TEST_CASE("Wigner d recursion matches the explicit sum") {
  for (double beta : {0.3, 1.1, 2.0, 2.9}) {
    for (int l = 0; l <= 10; ++l) {
      for (int m1 = -l; m1 <= l; ++m1) {
        for (int m2 = -l; m2 <= l; ++m2) {
          CHECK(std::abs(wigner_d(l, m1, m2, beta) - wigner_d_explicit(l, m1, m2, beta)) < 1e-12);
        }
      }
    }
  }
  // Rows stay unit vectors at high degree.
  for (int m1 : {0, 3, 40}) {
    double norm = 0.0;
    for (int m2 = -80; m2 <= 80; ++m2) norm += std::pow(wigner_d(80, m1, m2, 1.3), 2);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("spin harmonics match the Goldberg explicit formula") {
  // Independent high-precision evaluation of the same formula.
  const Complex y = spin_ylm({3, 1, 2}, Direction(0.7, 0.3));
  CHECK(y.real() == doctest::Approx(0.14066807253652677).epsilon(1e-13));
  CHECK(y.imag() == doctest::Approx(0.04351373399826363).epsilon(1e-13));
  for (const Direction& d : testing_support::random_directions(8, 11)) {
    for (int s = -3; s <= 3; ++s) {
      for (int l = std::abs(s); l <= 9; ++l) {
        for (int m = -l; m <= l; ++m) {
          CHECK(std::abs(spin_ylm({l, m, s}, d) - goldberg(l, m, s, d)) < 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(spin_ylm({1, 0, 2}, Direction(1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(spin_ylm({2, 3, 0}, Direction(1.0, 0.0)), DomainError);
}

TEST_CASE("spin zero reduces to the scalar harmonics bit for bit") {
  for (const Direction& d : testing_support::random_directions(10, 5)) {
    for (int l = 0; l <= 8; ++l) {
      for (int m = -l; m <= l; ++m) CHECK(spin_ylm({l, m, 0}, d) == ylm(l, m, d));
    }
  }
}

TEST_CASE("addition-theorem diagonal is constant") {
  for (int s : {0, 1, 2}) {
    for (int l : {4, 9}) {
      if (l < s) continue;
      for (const Direction& d : testing_support::random_directions(25, 9)) {
        double total = 0.0;
        for (int m = -l; m <= l; ++m) total += std::norm(spin_ylm({l, m, s}, d));
        CHECK(std::abs(total - (2 * l + 1) / (4 * kPi)) < 1e-12);
      }
    }
  }
}

TEST_CASE("basis tables agree with pointwise evaluation") {
  const SpinHarmonicBasis basis(2, 14);
  std::vector<double> out(basis.size());
  basis.evaluate(0.8, out);
  for (int l = 2; l <= 14; ++l) {
    for (int m = -l; m <= l; ++m) {
      CHECK(std::abs(out[harmonic_offset(l, m)] - spin_ylm({l, m, 2}, Direction(0.8, 0.0)).real()) <
            1e-13);
    }
  }
}

TEST_CASE("eth of a constant vanishes and a pole-touching grid is rejected") {
  const auto grid = ThetaPhiGrid::regular(21, 40, 0.3, kPi - 0.3);
  const GridField constant = sample_spin_ylm({0, 0, 0}, grid);
  const GridField raised = apply_eth(constant, 0, true);
  for (const Complex& v : raised.values) CHECK(std::abs(v) < 1e-12);
  CHECK_THROWS_AS(ThetaPhiGrid::regular(21, 40, 0.0, kPi - 0.3), DomainError);
  CHECK_THROWS_AS(ThetaPhiGrid::regular(21, 40, 0.3, kPi), DomainError);
}

TEST_CASE("eth ladder relations converge at second order") {
  const auto coarse = ThetaPhiGrid::regular(41, 64, 0.25, kPi - 0.25);
  const auto fine = ThetaPhiGrid::regular(81, 128, 0.25, kPi - 0.25);
  auto raise_error = [](const ThetaPhiGrid& g, int l, int m, int s) {
    const GridField field = sample_spin_ylm({l, m, s}, g);
    const GridField expected = sample_spin_ylm({l, m, s + 1}, g);
    return max_abs_diff(apply_eth(field, s, true), expected,
                        std::sqrt(static_cast<double>((l - s) * (l + s + 1))));
  };
  // eth Y_lm = sqrt(l(l+1)) Y_{lm;1}.
  const double e0 = raise_error(coarse, 3, 1, 0);
  const double e1 = raise_error(fine, 3, 1, 0);
  CHECK(e1 < 2e-2);
  CHECK(e0 / e1 > 3.0);
  // Same relation higher up the spin ladder.
  const double f0 = raise_error(coarse, 4, -2, 2);
  const double f1 = raise_error(fine, 4, -2, 2);
  CHECK(f0 / f1 > 3.0);

  // Lowering: ethbar Y_{lm;s} = -sqrt((l+s)(l-s+1)) Y_{lm;s-1}.
  auto lower_error = [](const ThetaPhiGrid& g, int l, int m, int s) {
    const GridField field = sample_spin_ylm({l, m, s}, g);
    const GridField expected = sample_spin_ylm({l, m, s - 1}, g);
    return max_abs_diff(apply_eth(field, s, false), expected,
                        -std::sqrt(static_cast<double>((l + s) * (l - s + 1))));
  };
  const double g0 = lower_error(coarse, 3, 2, 1);
  const double g1 = lower_error(fine, 3, 2, 1);
  CHECK(g0 / g1 > 3.0);
}

TEST_CASE("eigen-relation -ethbar eth Y = e_ls Y at second order") {
  auto error = [](int n_theta, int n_phi, int l, int m, int s) {
    const auto g = ThetaPhiGrid::regular(n_theta, n_phi, 0.3, kPi - 0.3);
    const GridField field = sample_spin_ylm({l, m, s}, g);
    const GridField lowered = apply_eth(apply_eth(field, s, true), s + 1, false);
    return max_abs_diff(lowered, field, -eigenvalue_spin(l, s));
  };
  const double e0 = error(41, 64, 2, 1, 0);
  const double e1 = error(81, 128, 2, 1, 0);
  CHECK(e1 < 0.05);
  CHECK(e0 / e1 > 3.0);
  const double f0 = error(41, 64, 4, 3, 2);
  const double f1 = error(81, 128, 4, 3, 2);
  CHECK(f0 / f1 > 3.0);
}
