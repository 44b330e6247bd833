#include <doctest.h>

#include <cmath>
#include <vector>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/quadrature.hpp"
#include "spinneedlets/transforms.hpp"
#include "support.hpp"

using namespace spinneedlets;
using testing_support::random_directions;
using testing_support::random_section;

TEST_CASE("coefficient container arithmetic") {
  HarmonicCoefficients a = random_section(1, 5, 1);
  const HarmonicCoefficients b = random_section(1, 5, 2);
  const HarmonicCoefficients sum = a + b;
  CHECK(sum(3, -2) == a(3, -2) + b(3, -2));
  CHECK(std::abs((sum - b)(4, 1) - a(4, 1)) < 1e-15);
  CHECK((Complex(2.0, 0.0) * a).energy() == doctest::Approx(4.0 * a.energy()));
  CHECK(a.effective_band_limit() == 5);
  const HarmonicCoefficients wider = a.with_band_limit(9);
  CHECK(wider.band_limit() == 9);
  CHECK(wider.effective_band_limit() == 5);
  CHECK(wider(5, 5) == a(5, 5));
  CHECK(a.with_band_limit(3).effective_band_limit() == 3);
  CHECK_THROWS_AS(a += random_section(2, 5, 3), UsageError);
  CHECK_THROWS_AS(a += random_section(1, 4, 3), UsageError);
}

TEST_CASE("point evaluation is the harmonic sum") {
  const HarmonicCoefficients a = random_section(2, 7, 4);
  for (const Direction& x : random_directions(10, 5)) {
    Complex direct{};
    for (int l = 2; l <= 7; ++l) {
      for (int m = -l; m <= l; ++m) direct += a(l, m) * spin_ylm({l, m, 2}, x);
    }
    CHECK(std::abs(evaluate(a, x) - direct) < 1e-12);
  }
}

TEST_CASE("point adjoint is the conjugate-harmonic sum") {
  const auto points = random_directions(30, 6);
  std::vector<Complex> values;
  for (std::size_t i = 0; i < points.size(); ++i) values.emplace_back(std::cos(i), std::sin(3.0 * i));
  const HarmonicCoefficients adj = adjoint_at_points(points, values, 1, 6);
  for (int l = 1; l <= 6; ++l) {
    for (int m = -l; m <= l; ++m) {
      Complex direct{};
      for (std::size_t i = 0; i < points.size(); ++i) {
        direct += values[i] * std::conj(spin_ylm({l, m, 1}, points[i]));
      }
      CHECK(std::abs(adj(l, m) - direct) < 1e-12);
    }
  }
  CHECK_THROWS_AS(adjoint_at_points(points, std::vector<Complex>(3), 1, 6), UsageError);
}

TEST_CASE("grid synthesis, adjoint and projection") {
  const HarmonicCoefficients a = random_section(2, 10, 7);
  const CubatureSet set = build_cubature(10);
  const std::vector<Complex> values = synthesize_on_grid(a, set.grid());
  const auto nodes = set.nodes();
  for (std::size_t k = 0; k < nodes.size(); k += 37) {
    CHECK(std::abs(values[k] - evaluate(a, nodes[k].point)) < 1e-11);
  }
  const HarmonicCoefficients back = project_on_grid(values, set, 2, 10);
  CHECK((back - a).energy() < 1e-22 * a.energy());

  // <S a, v> = <a, S* v> for the plain (unweighted) adjoint.
  std::vector<Complex> v(nodes.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = Complex(std::sin(0.3 * k), std::cos(0.7 * k));
  const HarmonicCoefficients adj = adjoint_on_grid(v, set.grid(), 2, 10);
  Complex lhs{};
  for (std::size_t k = 0; k < v.size(); ++k) lhs += values[k] * std::conj(v[k]);
  Complex rhs{};
  for (std::size_t i = 0; i < a.data().size(); ++i) rhs += a.data()[i] * std::conj(adj.data()[i]);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("dense-grid Lp norms") {
  HarmonicCoefficients c(0, 0);
  c(0, 0) = std::sqrt(4 * kPi);  // the constant 1
  CHECK(section_lp_norm(c, 1.0) == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(section_lp_norm(c, 2.0) == doctest::Approx(std::sqrt(4 * kPi)).epsilon(1e-12));
  CHECK(section_lp_norm(c, INFINITY) == doctest::Approx(1.0).epsilon(1e-12));
  const HarmonicCoefficients a = random_section(2, 8, 8);
  CHECK(section_lp_norm(a, 2.0) == doctest::Approx(std::sqrt(a.energy())).epsilon(1e-10));
  CHECK(section_lp_integral(a, 4.0) ==
        doctest::Approx(std::pow(section_lp_norm(a, 4.0), 4.0)).epsilon(1e-12));
}
