#include "spinneedlets/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spinneedlets/errors.hpp"

namespace spinneedlets {

GaussLegendreRule gauss_legendre(int count) {
  if (count < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendreRule rule{std::vector<double>(count), std::vector<double>(count)};
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      dp = count * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Final derivative at the converged root.
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 0; j < count; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
    }
    dp = count * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[count - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

CubatureSet::CubatureSet(int degree, ProductGrid grid, std::optional<int> level,
                         std::optional<double> bandwidth)
    : degree_(degree), grid_(std::move(grid)), level_(level), bandwidth_(bandwidth) {
  nodes_.reserve(grid_.size());
  for (std::size_t t = 0; t < grid_.theta.size(); ++t) {
    for (int j = 0; j < grid_.n_phi; ++j) {
      nodes_.push_back({Direction(grid_.theta[t], grid_.phi(j)), grid_.ring_weight[t]});
    }
  }
}

double CubatureSet::total_weight() const noexcept {
  double total = 0.0;
  for (const auto& node : nodes_) total += node.weight;
  return total;
}

double CubatureSet::min_weight() const noexcept {
  return *std::min_element(grid_.ring_weight.begin(), grid_.ring_weight.end());
}

double CubatureSet::max_weight() const noexcept {
  return *std::max_element(grid_.ring_weight.begin(), grid_.ring_weight.end());
}

CubatureSet build_cubature(int degree) {
  if (degree < 0) throw DomainError("build_cubature: negative degree");
  const GaussLegendreRule rule = gauss_legendre(degree + 1);
  ProductGrid grid;
  grid.n_phi = 2 * degree + 1;
  const double dphi = 2.0 * kPi / grid.n_phi;
  // Nodes ascend in cos(theta); store rings with ascending theta instead.
  for (int i = degree; i >= 0; --i) {
    grid.theta.push_back(std::acos(rule.nodes[i]));
    grid.ring_weight.push_back(rule.weights[i] * dphi);
  }
  return CubatureSet(degree, std::move(grid));
}

int level_degree(double bandwidth, int level) {
  if (!(bandwidth > 1.0)) throw ConfigError("needlet bandwidth must exceed 1");
  if (level < 0) throw ConfigError("needlet level must be non-negative");
  return static_cast<int>(std::ceil(2.0 * std::pow(bandwidth, level + 1) - 1e-9));
}

CubatureSet level_cubature(double bandwidth, int level) {
  const int degree = level_degree(bandwidth, level);
  CubatureSet base = build_cubature(degree);
  ProductGrid grid = base.grid();
  return CubatureSet(degree, std::move(grid), level, bandwidth);
}

Complex integrate(std::span<const Complex> values, const CubatureSet& set) {
  if (values.size() != set.size()) {
    throw UsageError("integrate: " + std::to_string(values.size()) + " values for " +
                     std::to_string(set.size()) + " nodes");
  }
  Complex total = 0.0;
  const auto nodes = set.nodes();
  for (std::size_t k = 0; k < values.size(); ++k) total += nodes[k].weight * values[k];
  return total;
}

}  // namespace spinneedlets
