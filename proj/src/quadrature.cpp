#include "lsvi/quadrature.hpp"

#include "lsvi/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace lsvi {

// Golub-Welsch: the nodes of the probabilists' Hermite rule are the
// eigenvalues of the Jacobi matrix with zero diagonal and off-diagonal
// sqrt(k); the weights are the squared first components of the normalized
// eigenvectors (the weight function has unit mass).
QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("Gauss-Hermite rule needs at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw Error("Gauss-Hermite eigen-solve failed");

  const Eigen::VectorXd& x = eig.eigenvalues();  // ascending
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v = eig.eigenvectors()(0, k);
    rule.weights[k] = v * v;
    rule.nodes[k] = x[k];
  }
  // Enforce the exact symmetry of the rule.
  for (int k = 0; k < n / 2; ++k) {
    const int j = n - 1 - k;
    const double node = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    const double weight = 0.5 * (rule.weights[j] + rule.weights[k]);
    rule.nodes[k] = -node;
    rule.nodes[j] = node;
    rule.weights[k] = rule.weights[j] = weight;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace lsvi
