#include "spinneedlets/besov.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/text_io.hpp"

namespace spinneedlets {

namespace {

constexpr int kCalibrationRounds = 6;
constexpr double kRelativeTolerance = 1e-12;

double inverse(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

bool same(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= kRelativeTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

double decay_exponent(const BesovParams& params) { return params.r + 0.5 - inverse(params.pi); }

}  // namespace

void BesovParams::validate() const {
  if (!(pi >= 1.0)) throw ConfigError("Besov index pi must be >= 1");
  if (!(q >= 1.0)) throw ConfigError("Besov index q must be >= 1");
  if (!(radius > 0.0) || std::isinf(radius)) throw ConfigError("Besov radius must be positive");
  if (!(r - 2.0 * inverse(pi) > 0.0)) throw ConfigError("Besov parameters need r - 2/pi > 0");
}

std::vector<double> level_norms(const NeedletCoefficients& coeffs, double pi) {
  std::vector<double> norms;
  for (int j = 0; j < coeffs.stored_levels(); ++j) {
    const auto level = coeffs.level(j);
    double value = 0.0;
    if (std::isinf(pi)) {
      for (const Complex& beta : level) value = std::max(value, std::abs(beta));
    } else {
      for (const Complex& beta : level) value += std::pow(std::abs(beta), pi);
      value = std::pow(value, 1.0 / pi);
    }
    norms.push_back(value);
  }
  return norms;
}

BesovNorm besov_norm_parts(const NeedletCoefficients& coeffs, const NeedletFrame& frame,
                           const BesovParams& params) {
  params.validate();
  BesovNorm norm;
  if (coeffs.stored_levels() == 0) return norm;
  const HarmonicCoefficients section = synthesize_harmonics(frame, coeffs);
  norm.lp_term = section_lp_norm(section, params.pi);

  const std::vector<double> levels = level_norms(coeffs, params.pi);
  const double B = frame.bandwidth();
  const double exponent = decay_exponent(params);
  double wavelet = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double term = std::pow(B, static_cast<double>(j) * exponent) * levels[j];
    if (std::isinf(params.q)) {
      wavelet = std::max(wavelet, term);
    } else {
      wavelet += std::pow(term, params.q);
    }
  }
  norm.wavelet_term = std::isinf(params.q) ? wavelet : std::pow(wavelet, 1.0 / params.q);
  return norm;
}

double besov_norm(const NeedletCoefficients& coeffs, const NeedletFrame& frame,
                  const BesovParams& params) {
  return besov_norm_parts(coeffs, frame, params).total();
}

BesovTestSection sample_besov_section(const NeedletFrame& frame, const BesovParams& params,
                                      int band_limit, std::uint64_t seed, double sparsity) {
  params.validate();
  const int s = frame.spin();
  if (band_limit < s + 1) throw ConfigError("Besov section needs band limit >= s + 1");
  if (band_limit > frame.tight_band_limit()) {
    throw ConfigError("Besov section band limit " + std::to_string(band_limit) +
                      " exceeds the frame's tight band limit " +
                      std::to_string(frame.tight_band_limit()));
  }
  if (!(sparsity >= 0.0) || !(sparsity < 1.0)) throw ConfigError("sparsity must lie in [0, 1)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  HarmonicCoefficients coeffs(s, band_limit);
  for (int l = std::max(s + 1, 1); l <= band_limit; ++l) {
    for (int m = -l; m <= l; ++m) coeffs(l, m) = Complex(gauss(rng), gauss(rng));
  }

  // Multiplicative per-level correction, spread over multipoles with the
  // partition-of-unity weights b_j^2(l).
  const double B = frame.bandwidth();
  const double exponent = decay_exponent(params);
  for (int round = 0; round < kCalibrationRounds; ++round) {
    const NeedletCoefficients beta = analyze(frame, coeffs);
    const std::vector<double> norms = level_norms(beta, params.pi);
    std::vector<double> log_factor(norms.size(), 0.0);
    for (std::size_t j = 0; j < norms.size(); ++j) {
      if (norms[j] > 0.0) {
        log_factor[j] = -static_cast<double>(j) * exponent * std::log(B) - std::log(norms[j]);
      }
    }
    for (int l = std::max(s + 1, 1); l <= band_limit; ++l) {
      double log_scale = 0.0;
      for (int j = 0; j < frame.levels(); ++j) {
        const double b = frame.weight(j, l);
        log_scale += b * b * log_factor[static_cast<std::size_t>(j)];
      }
      const double scale = std::exp(log_scale);
      for (int m = -l; m <= l; ++m) coeffs(l, m) *= scale;
    }
  }

  if (sparsity > 0.0) {
    std::bernoulli_distribution drop(sparsity);
    NeedletCoefficients beta = analyze(frame, coeffs);
    for (int j = 0; j < beta.stored_levels(); ++j) {
      for (Complex& value : beta.level(j)) {
        if (drop(rng)) value = Complex{};
      }
    }
    coeffs = synthesize_harmonics(frame, beta).with_band_limit(band_limit);
    for (int l = 0; l <= std::min(s, band_limit); ++l) {
      for (int m = -l; m <= l; ++m) coeffs(l, m) = Complex{};
    }
  }

  const double norm = besov_norm(analyze(frame, coeffs), frame, params);
  if (norm > 0.0) coeffs *= params.radius / norm * (1.0 - 1e-12);
  return {std::move(coeffs), params, seed, sparsity};
}

double check_embedding(const NeedletCoefficients& coeffs, const NeedletFrame& frame,
                       const BesovParams& from, const BesovParams& to) {
  const bool q_inclusion = same(from.r, to.r) && same(from.pi, to.pi) && from.q <= to.q;
  const bool pi_inclusion = same(from.r, to.r) && same(from.q, to.q) && to.pi <= from.pi;
  const bool sobolev_inclusion = same(from.q, to.q) && from.pi <= to.pi &&
                                 same(to.r, from.r - inverse(from.pi) + inverse(to.pi));
  if (!q_inclusion && !pi_inclusion && !sobolev_inclusion) {
    throw UsageError("check_embedding: parameter pair matches no Besov inclusion");
  }
  const double source = besov_norm(coeffs, frame, from);
  const double target = besov_norm(coeffs, frame, to);
  if (source == 0.0) return target == 0.0 ? 1.0 : INFINITY;
  return target / source;
}

double sup_norm(const HarmonicCoefficients& coeffs) {
  return section_lp_norm(coeffs, INFINITY, 4);
}

void write_section(std::ostream& out, const BesovTestSection& section) {
  const BesovParams& p = section.params;
  out << "# besov_section s=" << section.spin() << " L=" << section.band_limit()
      << " r=" << format_double(p.r) << " pi=" << format_double(p.pi)
      << " q=" << format_double(p.q) << " radius=" << format_double(p.radius)
      << " seed=" << section.seed << " sparsity=" << format_double(section.sparsity) << '\n';
  out << "l,m,re,im\n";
  for (int l = section.spin(); l <= section.band_limit(); ++l) {
    for (int m = -l; m <= l; ++m) {
      const Complex a = section.coeffs(l, m);
      out << l << ',' << m << ',' << format_double(a.real()) << ',' << format_double(a.imag())
          << '\n';
    }
  }
  if (!out) throw IoError("failed writing Besov section");
}

BesovTestSection read_section(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("Besov section: empty input");
  const auto header = parse_tagged_header(line, "besov_section");
  const int s = static_cast<int>(parse_int(header_value(header, "s")));
  const int L = static_cast<int>(parse_int(header_value(header, "L")));
  if (s < 0 || L < s) throw IoError("Besov section: inconsistent s/L in header");
  BesovTestSection section;
  section.params.r = parse_double(header_value(header, "r"));
  section.params.pi = parse_double(header_value(header, "pi"));
  section.params.q = parse_double(header_value(header, "q"));
  section.params.radius = parse_double(header_value(header, "radius"));
  section.seed = parse_uint64(header_value(header, "seed"));
  section.sparsity = parse_double(header_value(header, "sparsity"));
  section.coeffs = HarmonicCoefficients(s, L);
  if (!std::getline(in, line) || trim(line) != "l,m,re,im") {
    throw IoError("Besov section: expected column header 'l,m,re,im'");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) throw IoError("Besov section: malformed row '" + line + "'");
    const int l = static_cast<int>(parse_int(fields[0]));
    const int m = static_cast<int>(parse_int(fields[1]));
    if (l < 0 || l > L || std::abs(m) > l) throw IoError("Besov section: index out of range");
    section.coeffs(l, m) = Complex(parse_double(fields[2]), parse_double(fields[3]));
  }
  return section;
}

}  // namespace spinneedlets
