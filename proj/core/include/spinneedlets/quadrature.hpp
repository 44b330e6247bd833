#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinneedlets/sphere_core.hpp"

namespace spinneedlets {

// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int count);

struct CubatureNode {
  Direction point;
  double weight;
};

// Ring structure of a Gauss-Legendre x equispaced product rule. Node k sits on
// ring k / n_phi at longitude -pi + 2 pi (k % n_phi) / n_phi.
struct ProductGrid {
  std::vector<double> theta;        // ascending colatitudes
  std::vector<double> ring_weight;  // weight of every node on the ring
  int n_phi = 0;

  std::size_t size() const noexcept { return theta.size() * static_cast<std::size_t>(n_phi); }
  double phi(int j) const noexcept { return -kPi + 2.0 * kPi * j / n_phi; }
};

// Nodes and positive weights exact for every Y_{lm} conj(Y_{l'm'}) with
// l, l' <= degree (hence all spherical polynomials of degree <= 2*degree).
class CubatureSet {
 public:
  CubatureSet(int degree, ProductGrid grid, std::optional<int> level = std::nullopt,
              std::optional<double> bandwidth = std::nullopt);

  int degree() const noexcept { return degree_; }
  std::optional<int> level() const noexcept { return level_; }
  std::optional<double> bandwidth() const noexcept { return bandwidth_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const CubatureNode> nodes() const noexcept { return nodes_; }
  const CubatureNode& node(std::size_t k) const { return nodes_.at(k); }
  const ProductGrid& grid() const noexcept { return grid_; }

  double total_weight() const noexcept;
  double min_weight() const noexcept;
  double max_weight() const noexcept;

 private:
  int degree_;
  ProductGrid grid_;
  std::vector<CubatureNode> nodes_;
  std::optional<int> level_;
  std::optional<double> bandwidth_;
};

// degree + 1 Gauss-Legendre rings in cos(theta) times 2*degree + 1 longitudes.
CubatureSet build_cubature(int degree);

// Exactness degree for needlet level j: ceil(2 B^{j+1}).
int level_degree(double bandwidth, int level);

// Level-j node set of a needlet frame, tagged with (j, B).
CubatureSet level_cubature(double bandwidth, int level);

// Sum_k lambda_k values_k.
Complex integrate(std::span<const Complex> values, const CubatureSet& set);

}  // namespace spinneedlets
