#include "spinneedlets/needlets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/text_io.hpp"

namespace spinneedlets {

namespace {

constexpr int kMollifierNodes = 128;
constexpr std::size_t kTabulationSize = 1025;

void check_level(const NeedletFrame& frame, int j, std::size_t k) {
  if (j < 0 || j > frame.j_max()) {
    throw UsageError("needlet level " + std::to_string(j) + " outside frame (j_max = " +
                     std::to_string(frame.j_max()) + ")");
  }
  if (k >= frame.cubature(j).size()) {
    throw UsageError("needlet node " + std::to_string(k) + " outside level " + std::to_string(j));
  }
}

}  // namespace

WindowFunction::WindowFunction(double bandwidth, double smoothness)
    : bandwidth_(bandwidth), smoothness_(smoothness) {
  if (!(bandwidth > 1.0)) throw ConfigError("window bandwidth B must exceed 1");
  if (!(smoothness > 0.0)) throw ConfigError("window smoothness must be positive");
  rule_ = gauss_legendre(kMollifierNodes);
  normalization_ = mollifier_integral(1.0);
  tabulation_.resize(kTabulationSize);
  const double lo = 1.0 / bandwidth_;
  for (std::size_t i = 0; i < kTabulationSize; ++i) {
    const double t = lo + (bandwidth_ - lo) * static_cast<double>(i) / (kTabulationSize - 1);
    tabulation_[i] = (*this)(t);
  }
}

// Integral of exp(-smoothness / (1 - v^2)) from -1 to u, for u in (-1, 1].
double WindowFunction::mollifier_integral(double u) const {
  const double half = 0.5 * (u + 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
    const double v = -1.0 + half * (rule_.nodes[i] + 1.0);
    const double q = 1.0 - v * v;
    if (q > 0.0) total += rule_.weights[i] * std::exp(-smoothness_ / q);
  }
  return half * total;
}

double WindowFunction::smooth_step(double u) const {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return mollifier_integral(u) / normalization_;
}

double WindowFunction::cutoff(double t) const {
  const double lo = 1.0 / bandwidth_;
  if (t <= lo) return 1.0;
  if (t >= 1.0) return 0.0;
  return smooth_step(1.0 - 2.0 * bandwidth_ * (t - lo) / (bandwidth_ - 1.0));
}

double WindowFunction::squared(double t) const {
  if (!(t > 1.0 / bandwidth_) || !(t < bandwidth_)) return 0.0;
  return std::max(0.0, cutoff(t / bandwidth_) - cutoff(t));
}

double WindowFunction::operator()(double t) const { return std::sqrt(squared(t)); }

WindowFunction build_window(double bandwidth, double smoothness) {
  return WindowFunction(bandwidth, smoothness);
}

std::string_view to_string(Flavor flavor) noexcept {
  switch (flavor) {
    case Flavor::scalar:
      return "scalar";
    case Flavor::pure_spin:
      return "pure_spin";
    case Flavor::mixed:
      return "mixed";
  }
  return "unknown";
}

Flavor parse_flavor(std::string_view text) {
  if (text == "scalar") return Flavor::scalar;
  if (text == "pure_spin" || text == "pure") return Flavor::pure_spin;
  if (text == "mixed") return Flavor::mixed;
  throw ConfigError("unknown needlet flavor '" + std::string(text) + "'");
}

NeedletFrame::NeedletFrame(WindowFunction window, int spin, Flavor flavor, int j_max)
    : window_(std::move(window)), spin_(spin), flavor_(flavor), j_max_(j_max) {
  if (j_max < 0) throw ConfigError("frame needs j_max >= 0");
  if (spin < 0) throw ConfigError("frame spin must be non-negative");
  if (flavor == Flavor::scalar && spin != 0) {
    throw ConfigError("scalar needlets require spin 0");
  }
  const double B = window_.bandwidth();
  const int l_first = spin_;
  for (int j = 0; j <= j_max_; ++j) {
    cubature_.push_back(level_cubature(B, j));
    const double scale = std::pow(B, j);
    int lo = -1;
    int hi = -2;
    std::vector<double> weights;
    for (int l = l_first;; ++l) {
      const double t = std::sqrt(eigenvalue_spin(l, spin_)) / scale;
      if (t >= B) break;
      const double w = window_(t);
      if (w > 0.0) {
        if (lo < 0) lo = l;
        hi = l;
        weights.resize(static_cast<std::size_t>(hi - lo + 1), 0.0);
        weights.back() = w;
      }
    }
    if (lo < 0) {
      lo = 1;
      hi = 0;
    }
    support_.emplace_back(lo, hi);
    weights_.push_back(std::move(weights));
    band_limit_ = std::max(band_limit_, hi);
  }
  const double top = std::pow(B, j_max_);
  tight_band_limit_ = l_first;
  while (std::sqrt(eigenvalue_spin(tight_band_limit_ + 1, spin_)) <= top) ++tight_band_limit_;
}

FrameSignature NeedletFrame::signature() const noexcept {
  return {window_.bandwidth(), spin_, flavor_, j_max_, window_.smoothness()};
}

const CubatureSet& NeedletFrame::cubature(int j) const {
  if (j < 0 || j > j_max_) throw UsageError("needlet level outside frame");
  return cubature_[static_cast<std::size_t>(j)];
}

std::pair<int, int> NeedletFrame::support(int j) const {
  if (j < 0 || j > j_max_) throw UsageError("needlet level outside frame");
  return support_[static_cast<std::size_t>(j)];
}

double NeedletFrame::weight(int j, int l) const {
  const auto [lo, hi] = support(j);
  if (l < lo || l > hi) return 0.0;
  return weights_[static_cast<std::size_t>(j)][static_cast<std::size_t>(l - lo)];
}

NeedletFrame build_frame(double bandwidth, int spin, Flavor flavor, int j_max,
                         double smoothness) {
  return NeedletFrame(WindowFunction(bandwidth, smoothness), spin, flavor, j_max);
}

NeedletCoefficients::NeedletCoefficients(const NeedletFrame& frame, int top_level)
    : signature_(frame.signature()) {
  const int top = top_level < 0 ? frame.j_max() : std::min(top_level, frame.j_max());
  for (int j = 0; j <= top; ++j) levels_.emplace_back(frame.cubature(j).size(), Complex{});
}

NeedletCoefficients::NeedletCoefficients(FrameSignature signature,
                                         std::vector<std::vector<Complex>> levels)
    : signature_(signature), levels_(std::move(levels)) {}

std::size_t NeedletCoefficients::count() const noexcept {
  std::size_t total = 0;
  for (const auto& level : levels_) total += level.size();
  return total;
}

double NeedletCoefficients::energy() const noexcept {
  double total = 0.0;
  for (const auto& level : levels_) {
    for (const Complex& beta : level) total += std::norm(beta);
  }
  return total;
}

HarmonicCoefficients needlet_expansion(const NeedletFrame& frame, int j, std::size_t k) {
  check_level(frame, j, k);
  const auto [lo, hi] = frame.support(j);
  const int s = frame.spin();
  HarmonicCoefficients out(s, std::max(hi, std::max(s, 0)));
  if (lo > hi) return out;
  const CubatureNode& node = frame.cubature(j).node(k);
  const double root_weight = std::sqrt(node.weight);
  const SpinHarmonicBasis basis(frame.node_spin(), hi);
  std::vector<double> lam(basis.size());
  basis.evaluate(node.point.theta(), lam);
  for (int l = lo; l <= hi; ++l) {
    const double b = frame.weight(j, l);
    for (int m = -l; m <= l; ++m) {
      const std::size_t idx = harmonic_offset(l, m);
      out(l, m) = root_weight * b * lam[idx] * std::polar(1.0, -m * node.point.phi());
    }
  }
  return out;
}

Complex evaluate_needlet(const NeedletFrame& frame, int j, std::size_t k, const Direction& x) {
  return evaluate(needlet_expansion(frame, j, k), x);
}

NeedletCoefficients analyze_levels(const NeedletFrame& frame, const HarmonicCoefficients& coeffs,
                                   int top_level) {
  if (coeffs.spin() != frame.spin()) throw UsageError("analyze: spin of section differs from frame");
  NeedletCoefficients out(frame, top_level);
  for (int j = 0; j < out.stored_levels(); ++j) {
    const auto [lo, hi] = frame.support(j);
    const int top = std::min(hi, coeffs.band_limit());
    if (lo > top) continue;
    HarmonicCoefficients weighted(frame.node_spin(), top);
    bool any = false;
    for (int l = lo; l <= top; ++l) {
      const double b = frame.weight(j, l);
      for (int m = -l; m <= l; ++m) {
        weighted(l, m) = b * coeffs(l, m);
        any = any || weighted(l, m) != Complex{};
      }
    }
    if (!any) continue;
    const CubatureSet& set = frame.cubature(j);
    const std::vector<Complex> values = synthesize_on_grid(weighted, set.grid());
    auto level = out.level(j);
    const auto nodes = set.nodes();
    for (std::size_t k = 0; k < level.size(); ++k) level[k] = std::sqrt(nodes[k].weight) * values[k];
  }
  return out;
}

NeedletCoefficients analyze(const NeedletFrame& frame, const HarmonicCoefficients& coeffs) {
  if (coeffs.spin() != frame.spin()) throw UsageError("analyze: spin of section differs from frame");
  for (int l = 0; l <= std::min(coeffs.band_limit(), frame.spin()); ++l) {
    for (int m = -l; m <= l; ++m) {
      if (coeffs(l, m) != Complex{}) {
        throw DomainError("analyze: section has energy at l <= s (l = " + std::to_string(l) + ")");
      }
    }
  }
  if (coeffs.effective_band_limit() > frame.band_limit()) {
    throw DomainError("analyze: section exceeds the frame band limit " +
                      std::to_string(frame.band_limit()));
  }
  return analyze_levels(frame, coeffs, frame.j_max());
}

HarmonicCoefficients synthesize_harmonics(const NeedletFrame& frame,
                                          const NeedletCoefficients& coeffs) {
  if (!(coeffs.signature() == frame.signature())) {
    throw UsageError("synthesize: coefficients belong to a different frame");
  }
  const int levels = std::min(coeffs.stored_levels(), frame.levels());
  int band = frame.spin();
  for (int j = 0; j < levels; ++j) band = std::max(band, frame.support(j).second);
  HarmonicCoefficients out(frame.spin(), band);
  for (int j = 0; j < levels; ++j) {
    const auto [lo, hi] = frame.support(j);
    if (lo > hi) continue;
    const auto level = coeffs.level(j);
    const CubatureSet& set = frame.cubature(j);
    if (level.size() != set.size()) throw UsageError("synthesize: level size differs from frame");
    if (std::all_of(level.begin(), level.end(), [](Complex c) { return c == Complex{}; })) continue;
    std::vector<Complex> scaled(level.begin(), level.end());
    const auto nodes = set.nodes();
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] *= std::sqrt(nodes[k].weight);
    const HarmonicCoefficients h = adjoint_on_grid(scaled, set.grid(), frame.node_spin(), hi);
    for (int l = lo; l <= hi; ++l) {
      const double b = frame.weight(j, l);
      for (int m = -l; m <= l; ++m) out(l, m) += b * h(l, m);
    }
  }
  return out;
}

Complex synthesize(const NeedletFrame& frame, const NeedletCoefficients& coeffs,
                   const Direction& x) {
  return evaluate(synthesize_harmonics(frame, coeffs), x);
}

double needlet_l2_closed_form(const NeedletFrame& frame, int j, std::size_t k) {
  check_level(frame, j, k);
  const auto [lo, hi] = frame.support(j);
  double total = 0.0;
  for (int l = lo; l <= hi; ++l) {
    const double b = frame.weight(j, l);
    total += (2.0 * l + 1.0) / (4.0 * kPi) * b * b;
  }
  return std::sqrt(frame.cubature(j).node(k).weight * total);
}

double needlet_lp_norm(const NeedletFrame& frame, int j, std::size_t k, double p) {
  if (!(p >= 1.0)) throw DomainError("needlet_lp_norm: need p >= 1");
  const HarmonicCoefficients expansion = needlet_expansion(frame, j, k);
  return section_lp_norm(expansion, p, 4);
}

void write_coefficients(std::ostream& out, const NeedletCoefficients& coeffs) {
  const FrameSignature& sig = coeffs.signature();
  out << "# needlet_coefficients B=" << format_double(sig.bandwidth) << " s=" << sig.spin
      << " flavor=" << to_string(sig.flavor) << " j_max=" << sig.j_max
      << " smoothness=" << format_double(sig.smoothness) << '\n';
  out << "j,k,re,im\n";
  for (int j = 0; j < coeffs.stored_levels(); ++j) {
    const auto level = coeffs.level(j);
    for (std::size_t k = 0; k < level.size(); ++k) {
      out << j << ',' << k << ',' << format_double(level[k].real()) << ','
          << format_double(level[k].imag()) << '\n';
    }
  }
  if (!out) throw IoError("failed writing needlet coefficients");
}

NeedletCoefficients read_coefficients(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("needlet coefficients: empty input");
  const auto header = parse_tagged_header(line, "needlet_coefficients");
  FrameSignature sig;
  sig.bandwidth = parse_double(header_value(header, "B"));
  sig.spin = parse_int(header_value(header, "s"));
  sig.flavor = parse_flavor(header_value(header, "flavor"));
  sig.j_max = parse_int(header_value(header, "j_max"));
  sig.smoothness = parse_double(header_value(header, "smoothness"));
  if (!std::getline(in, line) || trim(line) != "j,k,re,im") {
    throw IoError("needlet coefficients: expected column header 'j,k,re,im'");
  }
  std::vector<std::vector<Complex>> levels;
  while (std::getline(in, line)) {
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (row.front() == '#') break;
    const auto fields = split_csv(row);
    if (fields.size() != 4) throw IoError("needlet coefficients: malformed row '" + line + "'");
    const int j = parse_int(fields[0]);
    const long long k = parse_int(fields[1]);
    if (j < 0 || k < 0) throw IoError("needlet coefficients: negative index");
    if (static_cast<std::size_t>(j) >= levels.size()) levels.resize(static_cast<std::size_t>(j) + 1);
    auto& level = levels[static_cast<std::size_t>(j)];
    if (static_cast<std::size_t>(k) != level.size()) {
      throw IoError("needlet coefficients: rows out of order at j=" + std::string(fields[0]));
    }
    level.emplace_back(parse_double(fields[2]), parse_double(fields[3]));
  }
  return NeedletCoefficients(sig, std::move(levels));
}

}  // namespace spinneedlets
