#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/needlets.hpp"
#include "support.hpp"

using namespace spinneedlets;
using testing_support::random_directions;
using testing_support::random_section;

namespace {

// Frozen from measurement (B = 2, s = 2, mixed flavor).
constexpr double kLocalizationLow = 1.5;
constexpr double kLocalizationHigh = 5.0;
// One-level norm equivalence, per p. The product cubature is redundant, so the
// p = 4 upper constant is far from 1.
constexpr double kPitagoraLow[] = {0.03, 20.0};
constexpr double kPitagoraHigh[] = {0.2, 200.0};

double sum_of_squares(const WindowFunction& b, double t, int levels) {
  double total = 0.0;
  for (int j = 0; j <= levels; ++j) total += b.squared(t / std::pow(b.bandwidth(), j));
  return total;
}

// The needlet formula summed term by term.
Complex needlet_brute(const NeedletFrame& frame, int j, std::size_t k, const Direction& x) {
  const CubatureNode& node = frame.cubature(j).node(k);
  const int s = frame.spin();
  const int s_node = frame.node_spin();
  Complex total{};
  for (int l = s; l <= frame.band_limit(); ++l) {
    const double b = frame.window()(std::sqrt(eigenvalue_spin(l, s)) / std::pow(frame.bandwidth(), j));
    if (b == 0.0) continue;
    for (int m = -l; m <= l; ++m) {
      total += b * std::conj(spin_ylm({l, m, s_node}, node.point)) * spin_ylm({l, m, s}, x);
    }
  }
  return std::sqrt(node.weight) * total;
}

double relative_grid_error(const HarmonicCoefficients& a, const HarmonicCoefficients& b) {
  const int L = std::max(a.band_limit(), b.band_limit());
  const HarmonicCoefficients d = a.with_band_limit(L) - b.with_band_limit(L);
  return section_lp_norm(d, 2.0) / section_lp_norm(b, 2.0);
}

}  // namespace

TEST_CASE("window support, positivity and partition of unity") {
  for (double B : {1.5, 2.0, 3.0}) {
    const WindowFunction b = build_window(B);
    CHECK(b(1.0 / B) == 0.0);
    CHECK(b(B) == 0.0);
    CHECK(b(0.5 / B) == 0.0);
    CHECK(b(1.3 * B) == 0.0);
    CHECK(b(1.0) > 0.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = std::pow(B, 8.0 * i / 999.0);
      CHECK(b(t / B) >= 0.0);
      worst = std::max(worst, std::abs(sum_of_squares(b, t, 12) - 1.0));
    }
    CHECK(worst < 1e-10);
  }
  CHECK(std::abs(sum_of_squares(build_window(2.0), 7.3, 30) - 1.0) < 1e-10);
  CHECK_THROWS_AS(build_window(1.0), ConfigError);
  CHECK_THROWS_AS(build_window(2.0, 0.0), ConfigError);
  CHECK(build_window(2.0).tabulation().size() > 100);
}

TEST_CASE("window derivative estimates converge (smoothness)") {
  const WindowFunction b = build_window(2.0);
  auto derivative = [&](double t, double h) { return (b(t + h) - b(t - h)) / (2 * h); };
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.5 + 1.5 * i / 21.0;
    const double coarse = derivative(t, 1e-3);
    const double fine = derivative(t, 5e-4);
    // Central differences: the gap shrinks like h^2.
    CHECK(std::abs(coarse - fine) < 1e-4 * std::max(1.0, std::abs(fine)));
  }
}

TEST_CASE("frame construction") {
  const NeedletFrame scalar = build_frame(2.0, 0, Flavor::scalar, 4);
  CHECK(scalar.levels() == 5);
  for (int j = 0; j <= 4; ++j) CHECK(scalar.cubature(j).degree() == static_cast<int>(std::ceil(2 * std::pow(2.0, j + 1))));

  const NeedletFrame mixed = build_frame(2.0, 2, Flavor::mixed, 3);
  for (int j = 0; j <= 3; ++j) {
    const auto [lo, hi] = mixed.support(j);
    for (int l = 2; l <= 40; ++l) {
      const double t = std::sqrt(eigenvalue_spin(l, 2)) / std::pow(2.0, j);
      const bool inside = t > 0.5 && t < 2.0;
      CHECK(inside == (l >= lo && l <= hi));
      CHECK((mixed.weight(j, l) > 0.0) == inside);
    }
  }
  const NeedletFrame pure = build_frame(1.5, 2, Flavor::pure_spin, 5);
  for (int j = 0; j <= 5; ++j) {
    for (int i = j + 2; i <= 5; ++i) {
      const auto a = pure.support(j);
      const auto b = pure.support(i);
      CHECK((a.first > a.second || b.first > b.second || a.second < b.first));
    }
  }
  CHECK_THROWS_AS(build_frame(2.0, 2, Flavor::scalar, 3), ConfigError);
  CHECK_THROWS_AS(build_frame(1.0, 0, Flavor::scalar, 3), ConfigError);
  CHECK_THROWS_AS(build_frame(2.0, 0, Flavor::scalar, -1), ConfigError);
  CHECK(parse_flavor("pure") == Flavor::pure_spin);
  CHECK(parse_flavor("mixed") == Flavor::mixed);
  CHECK_THROWS_AS(parse_flavor("spiky"), ConfigError);
}

TEST_CASE("needlet evaluation matches the defining sum") {
  for (Flavor flavor : {Flavor::pure_spin, Flavor::mixed}) {
    const NeedletFrame frame = build_frame(2.0, 2, flavor, 2);
    std::mt19937_64 rng(3);
    for (const Direction& x : random_directions(6, 12)) {
      const int j = static_cast<int>(rng() % 3);
      const std::size_t k = rng() % frame.cubature(j).size();
      CHECK(std::abs(evaluate_needlet(frame, j, k, x) - needlet_brute(frame, j, k, x)) < 1e-11);
    }
    CHECK_THROWS_AS(evaluate_needlet(frame, 3, 0, Direction(1.0, 0.0)), UsageError);
    CHECK_THROWS_AS(evaluate_needlet(frame, 0, 1000000, Direction(1.0, 0.0)), UsageError);
  }
}

TEST_CASE("scalar needlet at its own node is the positive kernel diagonal") {
  const NeedletFrame frame = build_frame(2.0, 0, Flavor::scalar, 3);
  for (int j = 1; j <= 3; ++j) {
    const CubatureNode& node = frame.cubature(j).node(7);
    const Complex value = evaluate_needlet(frame, j, 7, node.point);
    double expected = 0.0;
    const auto [lo, hi] = frame.support(j);
    for (int l = lo; l <= hi; ++l) expected += frame.weight(j, l) * (2 * l + 1) / (4 * kPi);
    CHECK(value.real() == doctest::Approx(std::sqrt(node.weight) * expected).epsilon(1e-11));
    CHECK(std::abs(value.imag()) < 1e-12);
  }
}

TEST_CASE("mixed flavor at spin zero coincides with scalar") {
  const NeedletFrame scalar = build_frame(2.0, 0, Flavor::scalar, 3);
  const NeedletFrame mixed = build_frame(2.0, 0, Flavor::mixed, 3);
  std::mt19937_64 rng(4);
  for (const Direction& x : random_directions(10, 13)) {
    const int j = static_cast<int>(rng() % 4);
    const std::size_t k = rng() % scalar.cubature(j).size();
    CHECK(std::abs(evaluate_needlet(scalar, j, k, x) - evaluate_needlet(mixed, j, k, x)) < 1e-13);
  }
}

TEST_CASE("needlets are localized uniformly across levels") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 4);
  std::vector<double> envelope;
  for (int j = 2; j <= 4; ++j) {
    const auto& set = frame.cubature(j);
    const std::size_t k = (set.grid().theta.size() / 2) * set.grid().n_phi;
    const Direction xi = set.node(k).point;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double dist = 1.2 * i / 49.0;
      const Direction x(xi.theta() + dist, xi.phi());
      const double bound = std::pow(1.0 + std::pow(2.0, j) * dist, 3.0);
      worst = std::max(worst, std::abs(evaluate_needlet(frame, j, k, x)) * bound / std::pow(2.0, j));
    }
    envelope.push_back(worst);
    CHECK(worst > kLocalizationLow);
    CHECK(worst < kLocalizationHigh);
  }
  const auto [lo, hi] = std::minmax_element(envelope.begin(), envelope.end());
  MESSAGE("localization envelope max/min = " << *hi / *lo);
  CHECK(*hi / *lo < 4.0);
}

TEST_CASE("analysis of a single mode collapses to one term") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::pure_spin, 3);
  HarmonicCoefficients a(2, 3);
  a(3, 0) = 1.0;
  const NeedletCoefficients beta = analyze(frame, a);
  for (int j = 0; j <= 3; ++j) {
    const double b = frame.window()(std::sqrt(6.0) / std::pow(2.0, j));
    const auto& set = frame.cubature(j);
    for (std::size_t k = 0; k < set.size(); k += 11) {
      const Complex expected = std::sqrt(set.node(k).weight) * b * spin_ylm({3, 0, 2}, set.node(k).point);
      CHECK(std::abs(beta.at(j, k) - expected) < 1e-13);
    }
  }
  const NeedletCoefficients zero = analyze(frame, HarmonicCoefficients(2, 8));
  CHECK(zero.energy() == 0.0);
}

TEST_CASE("analysis rejects energy at l <= s and beyond the frame") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 2);
  HarmonicCoefficients a(2, 4);
  a(2, 1) = 1.0;
  CHECK_THROWS_AS(analyze(frame, a), DomainError);
  HarmonicCoefficients wide(2, frame.band_limit() + 1);
  wide(frame.band_limit() + 1, 0) = 1.0;
  CHECK_THROWS_AS(analyze(frame, wide), DomainError);
  CHECK_THROWS_AS(analyze(frame, HarmonicCoefficients(1, 4)), UsageError);
}

TEST_CASE("tight frame and reconstruction") {
  for (int s : {0, 2}) {
    for (Flavor flavor : {Flavor::pure_spin, Flavor::mixed}) {
      const NeedletFrame frame = build_frame(2.0, s, flavor, 4);
      REQUIRE(frame.tight_band_limit() >= 8);
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const HarmonicCoefficients a = random_section(s, 8, 100 + seed, s + 1);
        const NeedletCoefficients beta = analyze(frame, a);
        CHECK(std::abs(beta.energy() - a.energy()) < 1e-8 * a.energy());
        CHECK(relative_grid_error(synthesize_harmonics(frame, beta), a) < 1e-6);
      }
    }
  }
}

TEST_CASE("synthesis: single coefficient, pointwise sums and linearity") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 3);
  NeedletCoefficients single(frame);
  single.at(2, 40) = 1.0;
  for (const Direction& x : random_directions(5, 14)) {
    CHECK(std::abs(synthesize(frame, single, x) - evaluate_needlet(frame, 2, 40, x)) < 1e-12);
  }

  const HarmonicCoefficients a = random_section(2, 8, 15);
  const NeedletCoefficients beta = analyze(frame, a);
  for (const Direction& x : random_directions(200, 16)) {
    const Complex truth = evaluate(a, x);
    CHECK(std::abs(synthesize(frame, beta, x) - truth) < 1e-6 * std::sqrt(a.energy()));
  }

  const NeedletCoefficients c1 = analyze(frame, random_section(2, 8, 17));
  const NeedletCoefficients c2 = analyze(frame, random_section(2, 8, 18));
  const Complex alpha(0.7, -1.3);
  NeedletCoefficients combo = c1;
  for (int j = 0; j < combo.stored_levels(); ++j) {
    for (std::size_t k = 0; k < combo.level(j).size(); ++k) combo.at(j, k) = alpha * c1.at(j, k) + c2.at(j, k);
  }
  for (const Direction& x : random_directions(10, 19)) {
    const Complex lhs = synthesize(frame, combo, x);
    const Complex rhs = alpha * synthesize(frame, c1, x) + synthesize(frame, c2, x);
    CHECK(std::abs(lhs - rhs) < 1e-11);
  }

  const NeedletFrame other = build_frame(2.0, 2, Flavor::pure_spin, 3);
  CHECK_THROWS_AS(synthesize_harmonics(other, beta), UsageError);
}

TEST_CASE("mixed coefficients split into electric and magnetic scalar parts") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 3);
  // Electric and magnetic parts: coefficients of real scalar fields.
  auto real_field = [](std::uint64_t seed) {
    HarmonicCoefficients c = random_section(2, 8, seed);
    for (int l = 3; l <= 8; ++l) {
      c(l, 0) = c(l, 0).real();
      for (int m = 1; m <= l; ++m) c(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(c(l, m));
    }
    return c;
  };
  const HarmonicCoefficients e = real_field(21);
  const HarmonicCoefficients mag = real_field(22);
  const HarmonicCoefficients a = e + Complex(0.0, 1.0) * mag;
  const NeedletCoefficients beta = analyze(frame, a);
  const NeedletCoefficients beta_e = analyze(frame, e);
  const NeedletCoefficients beta_m = analyze(frame, mag);
  for (int j = 0; j <= 3; ++j) {
    for (std::size_t k = 0; k < beta.level(j).size(); ++k) {
      // Scalar needlet coefficients of real fields are real.
      CHECK(std::abs(beta_e.at(j, k).imag()) < 1e-10);
      CHECK(std::abs(beta.at(j, k) - (beta_e.at(j, k) + Complex(0.0, 1.0) * beta_m.at(j, k))) < 1e-10);
    }
  }
  // The electric part alone: mixed analysis equals the scalar-harmonic sum at the node.
  const auto& set = frame.cubature(2);
  for (std::size_t k = 0; k < set.size(); k += 29) {
    Complex direct{};
    for (int l = 3; l <= 8; ++l) {
      const double b = frame.weight(2, l);
      for (int m = -l; m <= l; ++m) direct += b * e(l, m) * ylm(l, m, set.node(k).point);
    }
    CHECK(std::abs(beta_e.at(2, k) - std::sqrt(set.node(k).weight) * direct) < 1e-10);
  }
}

TEST_CASE("needlet L2 norms: closed form and unit bound") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::pure_spin, 4);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const int j = 1 + static_cast<int>(rng() % 4);
    const std::size_t k = rng() % frame.cubature(j).size();
    const double grid = needlet_lp_norm(frame, j, k, 2.0);
    CHECK(std::abs(grid - needlet_l2_closed_form(frame, j, k)) < 1e-6);
    CHECK(grid <= 1.0 + 1e-6);
  }
  CHECK_THROWS_AS(needlet_lp_norm(frame, 1, 0, 0.5), DomainError);
}

TEST_CASE("norm equivalence for needlet combinations at one level") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 3);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double p : {1.0, 4.0}) {
    for (int trial = 0; trial < 3; ++trial) {
      const int j = 2;
      NeedletCoefficients c(frame);
      double denominator = 0.0;
      for (std::size_t k = 0; k < c.level(j).size(); ++k) {
        c.at(j, k) = Complex(g(rng), g(rng));
        denominator += std::pow(std::abs(c.at(j, k)), p) * std::pow(needlet_lp_norm(frame, j, k, p), p);
      }
      const double numerator = section_lp_integral(synthesize_harmonics(frame, c), p, 4);
      const double ratio = numerator / denominator;
      MESSAGE("p=" << p << " ratio=" << ratio);
      const int band = p == 1.0 ? 0 : 1;
      CHECK(ratio > kPitagoraLow[band]);
      CHECK(ratio < kPitagoraHigh[band]);
    }
  }
}

TEST_CASE("coefficient text round trip") {
  const NeedletFrame frame = build_frame(2.0, 2, Flavor::mixed, 2);
  const NeedletCoefficients beta = analyze(frame, random_section(2, 6, 30));
  std::stringstream io;
  write_coefficients(io, beta);
  const NeedletCoefficients back = read_coefficients(io);
  CHECK(back.signature() == beta.signature());
  REQUIRE(back.stored_levels() == beta.stored_levels());
  for (int j = 0; j < beta.stored_levels(); ++j) {
    for (std::size_t k = 0; k < beta.level(j).size(); ++k) CHECK(back.at(j, k) == beta.at(j, k));
  }
  std::stringstream bad("# needlet_coefficients B=2 s=2 flavor=mixed j_max=2 smoothness=1\nj,k,re,im\n0,1,0,0\n");
  CHECK_THROWS_AS(read_coefficients(bad), IoError);
}
