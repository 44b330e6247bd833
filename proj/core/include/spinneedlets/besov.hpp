#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "spinneedlets/needlets.hpp"
#include "spinneedlets/transforms.hpp"

namespace spinneedlets {

// Smoothness r, integrability pi, summability q (either may be +inf) and ball radius G.
struct BesovParams {
  double r = 2.0;
  double pi = 2.0;
  double q = 2.0;
  double radius = 1.0;

  // Throws ConfigError unless pi, q >= 1, radius > 0 and r - 2/pi > 0.
  void validate() const;
};

struct BesovNorm {
  double lp_term = 0.0;       // ||F||_{L^pi}
  double wavelet_term = 0.0;  // weighted l_q norm of the per-level l_pi norms
  double total() const noexcept { return lp_term + wavelet_term; }
};

// ||(beta_jk)_k||_{l_pi} for every stored level.
std::vector<double> level_norms(const NeedletCoefficients& coeffs, double pi);

BesovNorm besov_norm_parts(const NeedletCoefficients& coeffs, const NeedletFrame& frame,
                           const BesovParams& params);

// ||F||_{L^pi} + [sum_j B^{jq(r+1/2-1/pi)} ||beta_j||_pi^q]^{1/q} (sup over j for q = inf).
double besov_norm(const NeedletCoefficients& coeffs, const NeedletFrame& frame,
                  const BesovParams& params);

// Band-limited section inside the Besov ball, drawn reproducibly from a seed.
struct BesovTestSection {
  HarmonicCoefficients coeffs;
  BesovParams params;
  std::uint64_t seed = 0;
  double sparsity = 0.0;

  int spin() const noexcept { return coeffs.spin(); }
  int band_limit() const noexcept { return coeffs.band_limit(); }
};

// Complex Gaussian coefficients for |s| < l <= L, reshaped so that level j has
// l_pi norm proportional to B^{-j(r+1/2-1/pi)}, optionally with a fraction
// `sparsity` of the needlet coefficients per level zeroed, then scaled so that
// the Besov norm is at most params.radius. L must not exceed the frame's tight
// band limit.
BesovTestSection sample_besov_section(const NeedletFrame& frame, const BesovParams& params,
                                      int band_limit, std::uint64_t seed, double sparsity = 0.0);

// besov_norm under `to` divided by besov_norm under `from`, for parameter pairs
// matching one of the inclusions
//   B^r_{pi q1} in B^r_{pi q2}                     (q1 <= q2),
//   B^r_{pi2 q} in B^r_{pi1 q}                     (pi1 <= pi2),
//   B^r_{pi1 q} in B^{r - 1/pi1 + 1/pi2}_{pi2 q}   (pi1 <= pi2).
// Any other pair is a UsageError.
double check_embedding(const NeedletCoefficients& coeffs, const NeedletFrame& frame,
                       const BesovParams& from, const BesovParams& to);

// Sup norm of a section on a 4x oversampled grid.
double sup_norm(const HarmonicCoefficients& coeffs);

// "# besov_section s=.. L=.. r=.. pi=.. q=.. radius=.. seed=.. sparsity=.." then "l,m,re,im".
void write_section(std::ostream& out, const BesovTestSection& section);
BesovTestSection read_section(std::istream& in);

}  // namespace spinneedlets
