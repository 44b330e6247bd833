#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinneedlets/besov.hpp"
#include "spinneedlets/needlets.hpp"

namespace spinneedlets {

enum class NoiseKind { gaussian, bounded_uniform, rademacher };

std::string_view to_string(NoiseKind kind) noexcept;
NoiseKind parse_noise_kind(std::string_view text);

// Circularly symmetric noise: real and imaginary parts iid, each with variance
// sigma^2 / 2, so that E|eps|^2 = sigma^2.
struct NoiseModel {
  NoiseKind kind = NoiseKind::gaussian;
  double sigma = 0.0;

  void validate() const;
  // Half-width for bounded_uniform, atom for rademacher, standard deviation for gaussian.
  double component_scale() const;
  // Sub-Gaussian standard of one component (all three kinds are strictly sub-Gaussian).
  double tau() const;
  Complex draw(std::mt19937_64& rng) const;
};

struct Dataset {
  int spin = 0;
  std::uint64_t seed = 0;
  std::string truth_id;
  std::vector<Direction> points;
  std::vector<Complex> values;

  std::size_t size() const noexcept { return points.size(); }
};

// sqrt(log n / n).
double threshold_rate(std::size_t n);
// Largest j >= 0 with B^j <= sqrt(n / log n). Needs n >= 2.
int cutoff_level(double bandwidth, std::size_t n);

struct EstimatorConfig {
  double bandwidth = 2.0;
  int spin = 0;
  Flavor flavor = Flavor::mixed;
  double kappa = 1.0;
  std::size_t n = 0;
  double sup_bound = 1.0;

  void validate() const;
  double threshold_rate() const { return spinneedlets::threshold_rate(n); }
  int cutoff_level() const { return spinneedlets::cutoff_level(bandwidth, n); }
  double threshold() const { return kappa * threshold_rate(); }
};

// 2 max(sigma, M) (p r / (r + 1))^{3/4}; for p = inf the exponent base uses r / (r + 1).
double default_kappa(double sigma, double sup_bound, double p, double r);

struct EstimateResult {
  NeedletCoefficients raw;
  NeedletCoefficients kept;
  std::vector<std::size_t> kept_count_per_level;
  EstimatorConfig config;
  int cutoff = 0;

  std::size_t kept_total() const noexcept;
};

// n uniform locations (cos theta and phi uniform), Y_i = F(X_i) + eps_i.
Dataset simulate_dataset(const BesovTestSection& truth, std::size_t n, const NoiseModel& noise,
                         std::uint64_t seed, std::string truth_id = {});

// Empirical harmonic coefficients (4 pi / n) sum_i Y_i conj(Y_{lm;s}(X_i)), l <= band_limit.
HarmonicCoefficients empirical_harmonics(const Dataset& data, int band_limit);

// beta_hat_jk = (4 pi / n) sum_i Y_i conj(psi_jk(X_i)) for j <= top_level.
NeedletCoefficients estimate_coefficients(const Dataset& data, const NeedletFrame& frame,
                                          int top_level);

// Keeps coefficients with |beta| > threshold.
NeedletCoefficients threshold_coefficients(const NeedletCoefficients& raw, double threshold);
NeedletCoefficients threshold_coefficients(const NeedletCoefficients& raw,
                                           const EstimatorConfig& config);

EstimateResult fit(const Dataset& data, const EstimatorConfig& config, const NeedletFrame& frame);

// Harmonic coefficients of the thresholded estimator F*.
HarmonicCoefficients estimate_harmonics(const EstimateResult& estimate, const NeedletFrame& frame);

// Dense-grid integral of |F* - F|^p (the grid supremum for p = inf).
double lp_loss(const EstimateResult& estimate, const BesovTestSection& truth,
               const NeedletFrame& frame, double p);
double lp_loss(const HarmonicCoefficients& estimate, const HarmonicCoefficients& truth, double p);

// Noise-only and total deviations of one needlet coefficient over coupled replicates.
struct ConcentrationReport {
  int level = 0;
  std::size_t node = 0;
  std::size_t n = 0;
  int replicates = 0;
  std::vector<double> kappas;
  std::vector<double> noise_tail;      // P((4pi/n)|sum conj(psi(X_i)) eps_i| > kappa t_n)
  std::vector<double> deviation_tail;  // P(|beta_hat - beta| > kappa t_n)
};

ConcentrationReport concentration_probe(const BesovTestSection& truth, const NeedletFrame& frame,
                                        int level, std::size_t n, const NoiseModel& noise,
                                        std::span<const double> kappas, int replicates,
                                        std::uint64_t seed, std::size_t node = 0);

// Monte Carlo draws of one estimated coefficient, replicate r seeded with seed + r.
std::vector<Complex> sample_coefficient(const BesovTestSection& truth, const NeedletFrame& frame,
                                        int level, std::size_t node, std::size_t n,
                                        const NoiseModel& noise, int replicates,
                                        std::uint64_t seed);

// (sigma^2 tau_jk^2 + M^2 tau_jk^2) 4 pi / n: variance bound for one estimated coefficient.
double coefficient_variance_bound(const NeedletFrame& frame, int level, std::size_t node,
                                  const NoiseModel& noise, double sup_bound, std::size_t n);

// "spin,n,seed,truth_id" header and values, then "theta,phi,re,im" rows.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

// Coefficient block followed by "# estimate_summary" and "J_n,kappa,t_n,kept_total".
void write_estimate(std::ostream& out, const EstimateResult& estimate);

}  // namespace spinneedlets
