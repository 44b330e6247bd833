#include "spinneedlets/regression.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/text_io.hpp"

namespace spinneedlets {

namespace {

constexpr double kFourPi = 4.0 * kPi;

Direction uniform_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cosine(-1.0, 1.0);
  std::uniform_real_distribution<double> longitude(-kPi, kPi);
  for (;;) {
    const double theta = std::acos(cosine(rng));
    const double phi = longitude(rng);
    if (theta > 0.0 && theta < kPi) return Direction(theta, phi);
  }
}

struct Draw {
  std::vector<Direction> points;
  std::vector<Complex> noise;
};

Draw draw_design(std::size_t n, const NoiseModel& noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Draw draw;
  draw.points.reserve(n);
  draw.noise.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    draw.points.push_back(uniform_direction(rng));
    draw.noise.push_back(noise.draw(rng));
  }
  return draw;
}

void check_node(const NeedletFrame& frame, int level, std::size_t node) {
  if (level < 0 || level > frame.j_max()) throw UsageError("needlet level out of range");
  if (node >= frame.cubature(level).size()) throw UsageError("needlet node out of range");
}

// <F, psi_jk> from harmonic coefficients.
Complex exact_coefficient(const HarmonicCoefficients& truth, const HarmonicCoefficients& psi) {
  const int L = std::min(truth.band_limit(), psi.band_limit());
  Complex total{};
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) total += truth(l, m) * std::conj(psi(l, m));
  }
  return total;
}

Complex empirical_coefficient(std::span<const Complex> psi_values, std::span<const Complex> y) {
  Complex total{};
  for (std::size_t i = 0; i < y.size(); ++i) total += y[i] * std::conj(psi_values[i]);
  return total * (kFourPi / static_cast<double>(y.size()));
}

}  // namespace

std::string_view to_string(NoiseKind kind) noexcept {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::bounded_uniform: return "bounded_uniform";
    case NoiseKind::rademacher: return "rademacher";
  }
  return "gaussian";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "gaussian") return NoiseKind::gaussian;
  if (text == "bounded_uniform" || text == "uniform") return NoiseKind::bounded_uniform;
  if (text == "rademacher") return NoiseKind::rademacher;
  throw ConfigError("unknown noise kind '" + std::string(text) + "'");
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || std::isinf(sigma)) throw ConfigError("noise sigma must be finite and >= 0");
}

double NoiseModel::component_scale() const {
  switch (kind) {
    case NoiseKind::gaussian: return sigma / std::sqrt(2.0);
    case NoiseKind::bounded_uniform: return sigma * std::sqrt(1.5);
    case NoiseKind::rademacher: return sigma / std::sqrt(2.0);
  }
  return 0.0;
}

double NoiseModel::tau() const {
  switch (kind) {
    case NoiseKind::gaussian: return component_scale();
    case NoiseKind::bounded_uniform: return component_scale() / std::sqrt(3.0);
    case NoiseKind::rademacher: return component_scale();
  }
  return 0.0;
}

Complex NoiseModel::draw(std::mt19937_64& rng) const {
  const double a = component_scale();
  switch (kind) {
    case NoiseKind::gaussian: {
      std::normal_distribution<double> component(0.0, 1.0);
      const double re = component(rng);
      return {a * re, a * component(rng)};
    }
    case NoiseKind::bounded_uniform: {
      std::uniform_real_distribution<double> component(-a, a);
      const double re = component(rng);
      return {re, component(rng)};
    }
    case NoiseKind::rademacher: {
      const std::uint64_t bits = rng();
      return {(bits & 1U) ? a : -a, (bits & 2U) ? a : -a};
    }
  }
  return {};
}

double threshold_rate(std::size_t n) {
  if (n < 2) throw ConfigError("threshold rate needs n >= 2");
  const double nn = static_cast<double>(n);
  return std::sqrt(std::log(nn) / nn);
}

int cutoff_level(double bandwidth, std::size_t n) {
  if (!(bandwidth > 1.0)) throw ConfigError("bandwidth B must exceed 1");
  const double limit = 1.0 / threshold_rate(n);
  int j = 0;
  while (std::pow(bandwidth, j + 1) <= limit) ++j;
  return j;
}

void EstimatorConfig::validate() const {
  if (!(bandwidth > 1.0)) throw ConfigError("bandwidth B must exceed 1");
  if (spin < 0) throw ConfigError("spin must be non-negative");
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (n < 2) throw ConfigError("estimator needs n >= 2");
  if (!(sup_bound >= 0.0)) throw ConfigError("sup bound must be >= 0");
}

double default_kappa(double sigma, double sup_bound, double p, double r) {
  const double gamma = std::isinf(p) ? r / (r + 1.0) : p * r / (r + 1.0);
  return 2.0 * std::max(sigma, sup_bound) * std::pow(gamma, 0.75);
}

std::size_t EstimateResult::kept_total() const noexcept {
  std::size_t total = 0;
  for (std::size_t c : kept_count_per_level) total += c;
  return total;
}

Dataset simulate_dataset(const BesovTestSection& truth, std::size_t n, const NoiseModel& noise,
                         std::uint64_t seed, std::string truth_id) {
  noise.validate();
  Draw draw = draw_design(n, noise, seed);
  Dataset data;
  data.spin = truth.spin();
  data.seed = seed;
  data.truth_id = std::move(truth_id);
  data.values = evaluate_at_points(truth.coeffs, draw.points);
  for (std::size_t i = 0; i < n; ++i) data.values[i] += draw.noise[i];
  data.points = std::move(draw.points);
  return data;
}

HarmonicCoefficients empirical_harmonics(const Dataset& data, int band_limit) {
  if (data.size() == 0) throw UsageError("empty dataset");
  HarmonicCoefficients a = adjoint_at_points(data.points, data.values, data.spin, band_limit);
  a *= kFourPi / static_cast<double>(data.size());
  return a;
}

NeedletCoefficients estimate_coefficients(const Dataset& data, const NeedletFrame& frame,
                                          int top_level) {
  if (data.size() == 0) throw UsageError("estimate_coefficients: empty dataset");
  if (data.spin != frame.spin()) throw UsageError("estimate_coefficients: spin differs from frame");
  if (top_level < 0 || top_level > frame.j_max()) {
    throw UsageError("estimate_coefficients: level cutoff exceeds the frame");
  }
  int band = frame.spin();
  for (int j = 0; j <= top_level; ++j) band = std::max(band, frame.support(j).second);
  return analyze_levels(frame, empirical_harmonics(data, band), top_level);
}

NeedletCoefficients threshold_coefficients(const NeedletCoefficients& raw, double threshold) {
  NeedletCoefficients kept = raw;
  for (int j = 0; j < kept.stored_levels(); ++j) {
    for (Complex& beta : kept.level(j)) {
      if (!(std::abs(beta) > threshold)) beta = Complex{};
    }
  }
  return kept;
}

NeedletCoefficients threshold_coefficients(const NeedletCoefficients& raw,
                                           const EstimatorConfig& config) {
  config.validate();
  return threshold_coefficients(raw, config.threshold());
}

EstimateResult fit(const Dataset& data, const EstimatorConfig& config, const NeedletFrame& frame) {
  config.validate();
  if (config.n != data.size()) throw UsageError("fit: config n differs from dataset size");
  if (config.spin != frame.spin() || data.spin != frame.spin()) {
    throw ConfigError("fit: spin of data, config and frame must agree");
  }
  if (config.flavor != frame.flavor() || config.bandwidth != frame.bandwidth()) {
    throw ConfigError("fit: flavor or bandwidth of config differs from frame");
  }
  EstimateResult result;
  result.config = config;
  result.cutoff = config.cutoff_level();
  if (result.cutoff > frame.j_max()) {
    throw ConfigError("fit: frame j_max " + std::to_string(frame.j_max()) +
                      " below the cutoff level " + std::to_string(result.cutoff));
  }
  result.raw = estimate_coefficients(data, frame, result.cutoff);
  result.kept = threshold_coefficients(result.raw, config.threshold());
  for (int j = 0; j < result.kept.stored_levels(); ++j) {
    const auto level = result.kept.level(j);
    result.kept_count_per_level.push_back(static_cast<std::size_t>(
        std::count_if(level.begin(), level.end(), [](Complex c) { return c != Complex{}; })));
  }
  return result;
}

HarmonicCoefficients estimate_harmonics(const EstimateResult& estimate, const NeedletFrame& frame) {
  return synthesize_harmonics(frame, estimate.kept);
}

double lp_loss(const HarmonicCoefficients& estimate, const HarmonicCoefficients& truth, double p) {
  if (!(p >= 1.0)) throw DomainError("loss index p must be >= 1");
  if (estimate.spin() != truth.spin()) throw UsageError("lp_loss: spin mismatch");
  const int L = std::max(estimate.band_limit(), truth.band_limit());
  const HarmonicCoefficients diff = estimate.with_band_limit(L) - truth.with_band_limit(L);
  return section_lp_integral(diff, p);
}

double lp_loss(const EstimateResult& estimate, const BesovTestSection& truth,
               const NeedletFrame& frame, double p) {
  return lp_loss(estimate_harmonics(estimate, frame), truth.coeffs, p);
}

std::vector<Complex> sample_coefficient(const BesovTestSection& truth, const NeedletFrame& frame,
                                        int level, std::size_t node, std::size_t n,
                                        const NoiseModel& noise, int replicates,
                                        std::uint64_t seed) {
  check_node(frame, level, node);
  if (n == 0 || replicates < 1) throw UsageError("sample_coefficient: need n >= 1 and replicates >= 1");
  const HarmonicCoefficients psi = needlet_expansion(frame, level, node);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    const Dataset data = simulate_dataset(truth, n, noise, seed + static_cast<std::uint64_t>(r));
    out.push_back(empirical_coefficient(evaluate_at_points(psi, data.points), data.values));
  }
  return out;
}

ConcentrationReport concentration_probe(const BesovTestSection& truth, const NeedletFrame& frame,
                                        int level, std::size_t n, const NoiseModel& noise,
                                        std::span<const double> kappas, int replicates,
                                        std::uint64_t seed, std::size_t node) {
  check_node(frame, level, node);
  noise.validate();
  if (replicates < 1) throw UsageError("concentration_probe: replicates must be >= 1");
  const double t_n = threshold_rate(n);
  if (std::pow(frame.bandwidth(), level) > 1.0 / t_n) {
    throw UsageError("concentration_probe: B^j exceeds sqrt(n / log n)");
  }
  const HarmonicCoefficients psi = needlet_expansion(frame, level, node);
  const Complex beta = exact_coefficient(truth.coeffs, psi);

  ConcentrationReport report;
  report.level = level;
  report.node = node;
  report.n = n;
  report.replicates = replicates;
  report.kappas.assign(kappas.begin(), kappas.end());
  std::vector<std::size_t> noise_hits(kappas.size(), 0);
  std::vector<std::size_t> deviation_hits(kappas.size(), 0);
  for (int r = 0; r < replicates; ++r) {
    const Draw draw = draw_design(n, noise, seed + static_cast<std::uint64_t>(r));
    const std::vector<Complex> psi_values = evaluate_at_points(psi, draw.points);
    std::vector<Complex> y = evaluate_at_points(truth.coeffs, draw.points);
    for (std::size_t i = 0; i < n; ++i) y[i] += draw.noise[i];
    const double noise_part = std::abs(empirical_coefficient(psi_values, draw.noise));
    const double deviation = std::abs(empirical_coefficient(psi_values, y) - beta);
    for (std::size_t c = 0; c < kappas.size(); ++c) {
      if (noise_part > kappas[c] * t_n) ++noise_hits[c];
      if (deviation > kappas[c] * t_n) ++deviation_hits[c];
    }
  }
  for (std::size_t c = 0; c < kappas.size(); ++c) {
    report.noise_tail.push_back(static_cast<double>(noise_hits[c]) / replicates);
    report.deviation_tail.push_back(static_cast<double>(deviation_hits[c]) / replicates);
  }
  return report;
}

double coefficient_variance_bound(const NeedletFrame& frame, int level, std::size_t node,
                                  const NoiseModel& noise, double sup_bound, std::size_t n) {
  check_node(frame, level, node);
  const double tau = needlet_l2_closed_form(frame, level, node);
  const double sigma2 = noise.sigma * noise.sigma;
  return kFourPi * (sigma2 + sup_bound * sup_bound) * tau * tau / static_cast<double>(n);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  if (data.truth_id.find_first_of(",\n") != std::string::npos) {
    throw UsageError("dataset truth id may not contain commas or newlines");
  }
  out << "spin,n,seed,truth_id\n";
  out << data.spin << ',' << data.size() << ',' << data.seed << ',' << data.truth_id << '\n';
  out << "theta,phi,re,im\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.points[i].theta()) << ',' << format_double(data.points[i].phi())
        << ',' << format_double(data.values[i].real()) << ','
        << format_double(data.values[i].imag()) << '\n';
  }
  if (!out) throw IoError("failed writing dataset");
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "spin,n,seed,truth_id") {
    throw IoError("dataset: expected header 'spin,n,seed,truth_id'");
  }
  if (!std::getline(in, line)) throw IoError("dataset: missing header values");
  const auto head = split_csv(line);
  if (head.size() != 4) throw IoError("dataset: malformed header values '" + line + "'");
  Dataset data;
  data.spin = static_cast<int>(parse_int(head[0]));
  const long long n = parse_int(head[1]);
  data.seed = parse_uint64(head[2]);
  data.truth_id = std::string(head[3]);
  if (data.spin < 0 || n < 0) throw IoError("dataset: negative spin or size");
  if (!std::getline(in, line) || trim(line) != "theta,phi,re,im") {
    throw IoError("dataset: expected column header 'theta,phi,re,im'");
  }
  data.points.reserve(static_cast<std::size_t>(n));
  data.values.reserve(static_cast<std::size_t>(n));
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) throw IoError("dataset: malformed row '" + line + "'");
    try {
      data.points.emplace_back(parse_double(fields[0]), parse_double(fields[1]));
    } catch (const DomainError& e) {
      throw IoError(std::string("dataset: invalid direction: ") + e.what());
    }
    data.values.emplace_back(parse_double(fields[2]), parse_double(fields[3]));
  }
  if (data.size() != static_cast<std::size_t>(n)) {
    throw IoError("dataset: header says n=" + std::to_string(n) + " but found " +
                  std::to_string(data.size()) + " rows");
  }
  return data;
}

void write_estimate(std::ostream& out, const EstimateResult& estimate) {
  write_coefficients(out, estimate.kept);
  out << "# estimate_summary\n";
  out << "J_n,kappa,t_n,kept_total\n";
  out << estimate.cutoff << ',' << format_double(estimate.config.kappa) << ','
      << format_double(estimate.config.threshold_rate()) << ',' << estimate.kept_total() << '\n';
  if (!out) throw IoError("failed writing estimate");
}

}  // namespace spinneedlets
