#include "spinneedlets/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/text_io.hpp"

namespace spinneedlets {

namespace {

constexpr double kZoneTolerance = 1e-12;
constexpr char kCsvHeader[] = "n,replicate,p,loss_p,J_n,kept_total,seed";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// "1024", "2^10" or "2^10..2^16".
void append_sizes(std::string_view token, std::vector<std::size_t>& out) {
  auto power = [](std::string_view t) -> std::pair<long long, long long> {
    const auto caret = t.find('^');
    if (caret == std::string_view::npos) return {parse_int(t), -1};
    return {parse_int(trim(t.substr(0, caret))), parse_int(trim(t.substr(caret + 1)))};
  };
  auto value = [](long long base, long long exponent) {
    if (exponent < 0) return base;
    if (base < 1 || exponent > 62) throw ConfigError("n_grid power out of range");
    long long v = 1;
    for (long long i = 0; i < exponent; ++i) v *= base;
    return v;
  };
  const auto dots = token.find("..");
  if (dots == std::string_view::npos) {
    const auto [base, exponent] = power(token);
    const long long n = value(base, exponent);
    if (n < 1) throw ConfigError("n_grid entries must be positive");
    out.push_back(static_cast<std::size_t>(n));
    return;
  }
  const auto [b0, e0] = power(trim(token.substr(0, dots)));
  const auto [b1, e1] = power(trim(token.substr(dots + 2)));
  if (e0 < 0 || e1 < 0 || b0 != b1 || e1 < e0) {
    throw ConfigError("n_grid range must look like 2^a..2^b with a <= b");
  }
  for (long long e = e0; e <= e1; ++e) out.push_back(static_cast<std::size_t>(value(b0, e)));
}

double parse_real_or_inf(const std::string& key, std::string_view text) {
  try {
    return parse_double(text);
  } catch (const IoError&) {
    throw ConfigError("config key '" + key + "': not a number: '" + std::string(text) + "'");
  }
}

long long parse_integer(const std::string& key, std::string_view text) {
  try {
    return parse_int(text);
  } catch (const IoError&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + std::string(text) + "'");
  }
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view to_string(Zone zone) noexcept {
  switch (zone) {
    case Zone::regular: return "regular";
    case Zone::sparse: return "sparse";
    case Zone::boundary: return "boundary";
  }
  return "regular";
}

Alpha alpha_theoretical(double r, double pi, double p) {
  if (std::isnan(r) || std::isnan(pi) || std::isnan(p) || !(pi >= 1.0)) {
    throw DomainError("alpha: need pi >= 1 and finite r");
  }
  const double inv_pi = std::isinf(pi) ? 0.0 : 1.0 / pi;
  if (!(r - 2.0 * inv_pi > 0.0) || std::isinf(r)) throw DomainError("alpha: need r - 2/pi > 0");
  if (!(p >= 1.0)) throw DomainError("alpha: need p >= 1");

  const double sparse_den = 2.0 * (r - 2.0 * (inv_pi - 0.5));
  if (std::isinf(p)) {
    return {(r - 2.0 * inv_pi) / sparse_den, std::isinf(pi) ? Zone::boundary : Zone::sparse};
  }
  const double boundary = p / (r + 1.0);
  Zone zone = Zone::sparse;
  if (std::abs(pi - boundary) <= kZoneTolerance * std::max(1.0, boundary)) {
    zone = Zone::boundary;
  } else if (pi > boundary) {
    zone = Zone::regular;
  }
  if (zone == Zone::sparse) return {p * (r - 2.0 * (inv_pi - 1.0 / p)) / sparse_den, zone};
  return {r * p / (2.0 * r + 2.0), zone};
}

void ExperimentConfig::validate() const {
  besov.validate();
  if (spin < 0) throw ConfigError("spin must be non-negative");
  if (flavor == Flavor::scalar && spin != 0) throw ConfigError("scalar flavor requires spin 0");
  if (!(bandwidth > 1.0) || std::isinf(bandwidth)) throw ConfigError("B must be a finite value > 1");
  if (!(smoothness > 0.0)) throw ConfigError("smoothness must be positive");
  noise.validate();
  if (!(p >= 1.0)) throw ConfigError("loss index p must be >= 1");
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("n_grid entries must be >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (kappa && !(*kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (sup_bound && !(*sup_bound >= 0.0)) throw ConfigError("sup_bound must be >= 0");
  if (band_limit && *band_limit <= spin) throw ConfigError("band_limit must exceed spin");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) throw ConfigError("sparsity must lie in [0, 1)");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

int ExperimentConfig::frame_levels() const { return cutoff_level(bandwidth, n_grid.back()); }

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    const std::string key = lower(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_number) + ": empty key or value");
    }
    if (!entries.emplace(key, value).second) throw ConfigError("duplicate config key '" + key + "'");
  }

  ExperimentConfig config;
  for (const auto& [key, value] : entries) {
    if (key == "r") {
      config.besov.r = parse_real_or_inf(key, value);
    } else if (key == "pi") {
      config.besov.pi = parse_real_or_inf(key, value);
    } else if (key == "q") {
      config.besov.q = parse_real_or_inf(key, value);
    } else if (key == "radius") {
      config.besov.radius = parse_real_or_inf(key, value);
    } else if (key == "spin") {
      config.spin = static_cast<int>(parse_integer(key, value));
    } else if (key == "flavor") {
      config.flavor = parse_flavor(value);
    } else if (key == "b") {
      config.bandwidth = parse_real_or_inf(key, value);
    } else if (key == "smoothness") {
      config.smoothness = parse_real_or_inf(key, value);
    } else if (key == "p") {
      config.p = parse_real_or_inf(key, value);
    } else if (key == "kappa") {
      if (lower(value) == "auto") {
        config.kappa.reset();
      } else {
        config.kappa = parse_real_or_inf(key, value);
      }
    } else if (key == "sigma") {
      config.noise.sigma = parse_real_or_inf(key, value);
    } else if (key == "noise_kind") {
      config.noise.kind = parse_noise_kind(value);
    } else if (key == "n_grid") {
      config.n_grid.clear();
      for (const auto token : split_csv(value)) append_sizes(trim(token), config.n_grid);
    } else if (key == "replicates") {
      config.replicates = static_cast<int>(parse_integer(key, value));
    } else if (key == "seed") {
      try {
        config.seed = parse_uint64(value);
      } catch (const IoError&) {
        throw ConfigError("config key 'seed': not an unsigned integer: '" + value + "'");
      }
    } else if (key == "sup_bound") {
      if (lower(value) == "auto") {
        config.sup_bound.reset();
      } else {
        config.sup_bound = parse_real_or_inf(key, value);
      }
    } else if (key == "band_limit") {
      if (lower(value) == "auto") {
        config.band_limit.reset();
      } else {
        config.band_limit = static_cast<int>(parse_integer(key, value));
      }
    } else if (key == "truth_mode") {
      if (value == "fixed") {
        config.truth_mode = TruthMode::fixed;
      } else if (value == "per_replicate") {
        config.truth_mode = TruthMode::per_replicate;
      } else {
        throw ConfigError("truth_mode must be 'fixed' or 'per_replicate'");
      }
    } else if (key == "sparsity") {
      config.sparsity = parse_real_or_inf(key, value);
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_integer(key, value));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

NeedletFrame experiment_frame(const ExperimentConfig& config) {
  return build_frame(config.bandwidth, config.spin, config.flavor, config.frame_levels(),
                     config.smoothness);
}

int experiment_band_limit(const ExperimentConfig& config, const NeedletFrame& frame) {
  return config.band_limit.value_or(frame.tight_band_limit());
}

BesovTestSection experiment_truth(const ExperimentConfig& config, const NeedletFrame& frame,
                                  int replicate) {
  const int family = config.truth_mode == TruthMode::fixed ? 0 : replicate + 1;
  const std::uint64_t seed = splitmix64(config.seed ^ splitmix64(0x7275746800ULL + family));
  return sample_besov_section(frame, config.besov, experiment_band_limit(config, frame), seed,
                              config.sparsity);
}

double experiment_sup_bound(const ExperimentConfig& config, const BesovTestSection& truth) {
  return config.sup_bound ? *config.sup_bound : sup_norm(truth.coeffs);
}

double experiment_kappa(const ExperimentConfig& config, double sup_bound) {
  return config.kappa ? *config.kappa
                      : default_kappa(config.noise.sigma, sup_bound, config.p, config.besov.r);
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t n, int replicate) {
  return splitmix64(splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(n))) +
                    static_cast<std::uint64_t>(replicate));
}

RateFit estimate_rate(std::span<const RatePoint> points) {
  if (points.size() < 3) throw UsageError("estimate_rate: need at least 3 distinct n values");
  std::vector<double> x;
  std::vector<double> y;
  for (const RatePoint& point : points) {
    if (point.n < 2) throw UsageError("estimate_rate: n must be >= 2");
    if (!(point.mean_loss > 0.0) || std::isinf(point.mean_loss)) {
      throw UsageError("estimate_rate: mean loss must be positive and finite");
    }
    const double n = static_cast<double>(point.n);
    x.push_back(std::log(n / std::log(n)));
    y.push_back(std::log(point.mean_loss));
  }
  const double count = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw UsageError("estimate_rate: need at least 3 distinct n values");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points.assign(points.begin(), points.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals.push_back(y[i] - (fit.intercept + fit.slope * x[i]));
  }
  return fit;
}

RateFit estimate_rate(std::span<const ConvergenceRow> rows) {
  std::map<std::size_t, std::pair<double, std::size_t>> sums;
  for (const ConvergenceRow& row : rows) {
    auto& [total, count] = sums[row.n];
    total += row.loss_p;
    ++count;
  }
  std::vector<RatePoint> points;
  for (const auto& [n, sum] : sums) points.push_back({n, sum.first / static_cast<double>(sum.second)});
  return estimate_rate(points);
}

RateResult run_convergence(const ExperimentConfig& config) {
  config.validate();
  const NeedletFrame frame = experiment_frame(config);
  const int replicates = config.replicates;
  const bool fixed = config.truth_mode == TruthMode::fixed;

  std::vector<BesovTestSection> truths;
  for (int r = 0; r < (fixed ? 1 : replicates); ++r) truths.push_back(experiment_truth(config, frame, r));

  RateResult result;
  result.theory = alpha_theoretical(config.besov.r, config.besov.pi, config.p);
  result.sup_bound = experiment_sup_bound(config, truths.front());
  result.kappa = experiment_kappa(config, result.sup_bound);

  const std::size_t cells = config.n_grid.size() * static_cast<std::size_t>(replicates);
  result.rows.resize(cells);
  parallel_for(cells, config.threads, [&](std::size_t cell) {
    const std::size_t n = config.n_grid[cell / static_cast<std::size_t>(replicates)];
    const int replicate = static_cast<int>(cell % static_cast<std::size_t>(replicates));
    const BesovTestSection& truth = truths[fixed ? 0 : static_cast<std::size_t>(replicate)];
    const std::uint64_t seed = cell_seed(config.seed, n, replicate);
    const Dataset data = simulate_dataset(truth, n, config.noise, seed);
    EstimatorConfig estimator;
    estimator.bandwidth = config.bandwidth;
    estimator.spin = config.spin;
    estimator.flavor = config.flavor;
    estimator.kappa = result.kappa;
    estimator.n = n;
    estimator.sup_bound = result.sup_bound;
    const EstimateResult estimate = fit(data, estimator, frame);
    ConvergenceRow& row = result.rows[cell];
    row.n = n;
    row.replicate = replicate;
    row.p = config.p;
    row.loss_p = lp_loss(estimate, truth, frame, config.p);
    row.cutoff = estimate.cutoff;
    row.kept_total = estimate.kept_total();
    row.seed = seed;
  });
  result.fit = estimate_rate(std::span<const ConvergenceRow>(result.rows));
  return result;
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  std::vector<ConvergenceRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ConvergenceRow& a, const ConvergenceRow& b) {
    return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
  });
  out << kCsvHeader << '\n';
  for (const ConvergenceRow& row : sorted) {
    out << row.n << ',' << row.replicate << ',' << format_double(row.p) << ','
        << format_double(row.loss_p) << ',' << row.cutoff << ',' << row.kept_total << ','
        << row.seed << '\n';
  }
  if (!out) throw IoError("failed writing convergence CSV");
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw IoError(std::string("convergence CSV: expected header '") + kCsvHeader + "'");
  }
  std::vector<ConvergenceRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 7) throw IoError("convergence CSV: malformed row '" + line + "'");
    ConvergenceRow row;
    const long long n = parse_int(fields[0]);
    if (n < 0) throw IoError("convergence CSV: negative n");
    row.n = static_cast<std::size_t>(n);
    row.replicate = static_cast<int>(parse_int(fields[1]));
    row.p = parse_double(fields[2]);
    row.loss_p = parse_double(fields[3]);
    row.cutoff = static_cast<int>(parse_int(fields[4]));
    row.kept_total = static_cast<std::size_t>(parse_int(fields[5]));
    row.seed = parse_uint64(fields[6]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spinneedlets
