#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinneedlets/quadrature.hpp"
#include "spinneedlets/sphere_core.hpp"
#include "spinneedlets/transforms.hpp"

namespace spinneedlets {

// Smooth window b supported in (1/B, B) with sum_j b^2(t / B^j) = 1 for t >= 1.
//
// Built from the mollifier f(u) = exp(-smoothness / (1 - u^2)): its normalised
// primitive gives a C-infinity step, the step is rescaled into a cutoff equal
// to 1 on [0, 1/B] and 0 on [1, inf), and b^2(t) = cutoff(t / B) - cutoff(t).
class WindowFunction {
 public:
  WindowFunction(double bandwidth, double smoothness = 1.0);

  double bandwidth() const noexcept { return bandwidth_; }
  double smoothness() const noexcept { return smoothness_; }

  double operator()(double t) const;
  double squared(double t) const;

  // Samples of b at equispaced points of [1/B, B] (endpoints included).
  std::span<const double> tabulation() const noexcept { return tabulation_; }

 private:
  double mollifier_integral(double u) const;
  double smooth_step(double u) const;
  double cutoff(double t) const;

  double bandwidth_;
  double smoothness_;
  double normalization_ = 1.0;
  GaussLegendreRule rule_;
  std::vector<double> tabulation_;
};

WindowFunction build_window(double bandwidth, double smoothness = 1.0);

enum class Flavor { scalar, pure_spin, mixed };

std::string_view to_string(Flavor flavor) noexcept;
Flavor parse_flavor(std::string_view text);

// Parameters that identify a frame; coefficients carry a copy.
struct FrameSignature {
  double bandwidth = 2.0;
  int spin = 0;
  Flavor flavor = Flavor::scalar;
  int j_max = 0;
  double smoothness = 1.0;

  bool operator==(const FrameSignature&) const = default;
};

class NeedletFrame {
 public:
  NeedletFrame(WindowFunction window, int spin, Flavor flavor, int j_max);

  const WindowFunction& window() const noexcept { return window_; }
  double bandwidth() const noexcept { return window_.bandwidth(); }
  int spin() const noexcept { return spin_; }
  Flavor flavor() const noexcept { return flavor_; }
  int j_max() const noexcept { return j_max_; }
  int levels() const noexcept { return j_max_ + 1; }
  FrameSignature signature() const noexcept;

  // Spin of the node-side harmonic: s for pure spin needlets, 0 otherwise.
  int node_spin() const noexcept { return flavor_ == Flavor::pure_spin ? spin_ : 0; }

  const CubatureSet& cubature(int j) const;

  // Inclusive multipole range where b(sqrt(e_ls) / B^j) > 0; first > second if empty.
  std::pair<int, int> support(int j) const;
  // b(sqrt(e_ls) / B^j), zero outside the support.
  double weight(int j, int l) const;
  // Largest multipole reached by any level.
  int band_limit() const noexcept { return band_limit_; }
  // Largest multipole for which sum_j b^2 = 1, i.e. sqrt(e_ls) <= B^{j_max}.
  int tight_band_limit() const noexcept { return tight_band_limit_; }

 private:
  WindowFunction window_;
  int spin_;
  Flavor flavor_;
  int j_max_;
  std::vector<CubatureSet> cubature_;
  std::vector<std::pair<int, int>> support_;
  std::vector<std::vector<double>> weights_;  // [j][l - support.first]
  int band_limit_ = 0;
  int tight_band_limit_ = 0;
};

NeedletFrame build_frame(double bandwidth, int spin, Flavor flavor, int j_max,
                         double smoothness = 1.0);

// beta_{jk} for k over the level-j nodes. Levels beyond the stored range are
// treated as absent (all zero).
class NeedletCoefficients {
 public:
  NeedletCoefficients() = default;
  explicit NeedletCoefficients(const NeedletFrame& frame, int top_level = -1);
  NeedletCoefficients(FrameSignature signature, std::vector<std::vector<Complex>> levels);

  const FrameSignature& signature() const noexcept { return signature_; }
  int stored_levels() const noexcept { return static_cast<int>(levels_.size()); }

  std::span<Complex> level(int j) { return levels_.at(static_cast<std::size_t>(j)); }
  std::span<const Complex> level(int j) const { return levels_.at(static_cast<std::size_t>(j)); }
  Complex& at(int j, std::size_t k) { return levels_.at(static_cast<std::size_t>(j)).at(k); }
  Complex at(int j, std::size_t k) const {
    return levels_.at(static_cast<std::size_t>(j)).at(k);
  }

  std::size_t count() const noexcept;
  double energy() const noexcept;

 private:
  FrameSignature signature_;
  std::vector<std::vector<Complex>> levels_;
};

// psi_{jk}(x) = sqrt(lambda_jk) sum_l b(sqrt(e_ls)/B^j) sum_m conj(Y_{lm;s*}(xi_jk)) Y_{lm;s}(x).
Complex evaluate_needlet(const NeedletFrame& frame, int j, std::size_t k, const Direction& x);

// Harmonic expansion of psi_{jk} (spin s coefficients).
HarmonicCoefficients needlet_expansion(const NeedletFrame& frame, int j, std::size_t k);

// beta_{jk} from the harmonic coefficients of a spin-s section. Rejects energy
// at l <= s and beyond the frame band limit.
NeedletCoefficients analyze(const NeedletFrame& frame, const HarmonicCoefficients& coeffs);

// Same map without input validation, restricted to levels 0..top_level.
NeedletCoefficients analyze_levels(const NeedletFrame& frame, const HarmonicCoefficients& coeffs,
                                   int top_level);

// Harmonic coefficients of sum_jk beta_jk psi_jk.
HarmonicCoefficients synthesize_harmonics(const NeedletFrame& frame,
                                          const NeedletCoefficients& coeffs);

// sum_j sum_k beta_jk psi_jk(x).
Complex synthesize(const NeedletFrame& frame, const NeedletCoefficients& coeffs,
                   const Direction& x);

// Closed form ||psi_jk||_2 = sqrt(lambda_jk sum_l (2l+1)/(4pi) b^2(sqrt(e_ls)/B^j)).
double needlet_l2_closed_form(const NeedletFrame& frame, int j, std::size_t k);

// ||psi_jk||_p by quadrature on a product grid of degree 4x the level band limit.
double needlet_lp_norm(const NeedletFrame& frame, int j, std::size_t k, double p);

// Text format: "# needlet_coefficients B=.. s=.. flavor=.. j_max=.. smoothness=.."
// then the header "j,k,re,im" and one row per coefficient.
void write_coefficients(std::ostream& out, const NeedletCoefficients& coeffs);
NeedletCoefficients read_coefficients(std::istream& in);

}  // namespace spinneedlets
