#pragma once

#include <vector>

namespace lsvi {

/// Nodes and weights for integrals against the standard normal density:
/// E[f(t)], t ~ N(0,1), is approximated by sum_k weights[k] * f(nodes[k]).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Hermite rule for the N(0,1) weight (weights sum to 1).
/// Nodes come out in ascending order and are exactly antisymmetric.
QuadratureRule gauss_hermite(int n);

}  // namespace lsvi
