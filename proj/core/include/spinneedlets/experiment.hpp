#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spinneedlets/besov.hpp"
#include "spinneedlets/needlets.hpp"
#include "spinneedlets/regression.hpp"

namespace spinneedlets {

enum class Zone { regular, sparse, boundary };
std::string_view to_string(Zone zone) noexcept;

struct Alpha {
  double alpha = 0.0;
  Zone zone = Zone::regular;
};

// Rate exponent of the thresholding estimator. Regular zone (pi >= p/(r+1)):
// rp/(2r+2); sparse zone: p(r - 2(1/pi - 1/p)) / (2(r - 2(1/pi - 1/2)));
// p = inf: (r - 2/pi) / (2(r - 2(1/pi - 1/2))). DomainError unless r - 2/pi > 0
// and p >= 1.
Alpha alpha_theoretical(double r, double pi, double p);

enum class TruthMode { fixed, per_replicate };

struct ExperimentConfig {
  BesovParams besov;
  int spin = 2;
  Flavor flavor = Flavor::mixed;
  double bandwidth = 2.0;
  double smoothness = 1.0;
  NoiseModel noise{NoiseKind::gaussian, 0.5};
  double p = 2.0;
  std::vector<std::size_t> n_grid;
  int replicates = 1;
  std::uint64_t seed = 1;
  std::optional<double> kappa;      // empty: default_kappa
  std::optional<double> sup_bound;  // empty: measured sup norm of the truth
  std::optional<int> band_limit;    // empty: the frame's tight band limit
  TruthMode truth_mode = TruthMode::fixed;
  double sparsity = 0.0;
  int threads = 0;  // 0: hardware concurrency

  // Throws ConfigError on any violated invariant.
  void validate() const;
  // Frame depth: the cutoff level of the largest n.
  int frame_levels() const;
};

// Flat "key = value" text; '#' starts a comment. n_grid takes a comma list whose
// entries are integers, powers "2^k", or power ranges "2^a..2^b".
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

NeedletFrame experiment_frame(const ExperimentConfig& config);
int experiment_band_limit(const ExperimentConfig& config, const NeedletFrame& frame);
// Truth for a replicate (replicate is ignored in fixed mode).
BesovTestSection experiment_truth(const ExperimentConfig& config, const NeedletFrame& frame,
                                  int replicate);
double experiment_sup_bound(const ExperimentConfig& config, const BesovTestSection& truth);
double experiment_kappa(const ExperimentConfig& config, double sup_bound);
std::uint64_t cell_seed(std::uint64_t base, std::size_t n, int replicate);

struct ConvergenceRow {
  std::size_t n = 0;
  int replicate = 0;
  double p = 2.0;
  double loss_p = 0.0;
  int cutoff = 0;
  std::size_t kept_total = 0;
  std::uint64_t seed = 0;
};

struct RatePoint {
  std::size_t n = 0;
  double mean_loss = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<RatePoint> points;
  std::vector<double> residuals;  // log(mean loss) minus the fitted line, per point
};

struct RateResult {
  std::vector<ConvergenceRow> rows;
  RateFit fit;
  Alpha theory;
  double kappa = 0.0;
  double sup_bound = 0.0;
};

// Least-squares slope of log(mean loss^p) against log(n / log n); rows are
// averaged per n first. UsageError for fewer than 3 distinct n.
RateFit estimate_rate(std::span<const ConvergenceRow> rows);
RateFit estimate_rate(std::span<const RatePoint> points);

RateResult run_convergence(const ExperimentConfig& config);

// "n,replicate,p,loss_p,J_n,kept_total,seed".
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);
std::vector<ConvergenceRow> read_convergence_csv(std::istream& in);

}  // namespace spinneedlets
