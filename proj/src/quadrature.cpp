#include "funcito/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "funcito/errors.hpp"

namespace funcito {

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw ContractError("Gauss-Hermite needs at least one node");

  // Jacobi matrix: zero diagonal, off-diagonal sqrt(k) (probabilists'
  // recurrence p_{k+1} = x p_k - k p_{k-1}).
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);

  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    gh.nodes[k] = es.eigenvalues()(k);  // ascending
    const double q0 = es.eigenvectors()(0, k);
    gh.weights[k] = q0 * q0;  // beta_0 = 1 for the normalized measure
  }

  // enforce exact antisymmetry of the rule
  for (int k = 0; k < n / 2; ++k) {
    const int m = n - 1 - k;
    const double z = 0.5 * (gh.nodes[k] - gh.nodes[m]);
    gh.nodes[k] = z;
    gh.nodes[m] = -z;
    const double w = 0.5 * (gh.weights[k] + gh.weights[m]);
    gh.weights[k] = w;
    gh.weights[m] = w;
  }
  if (n % 2 == 1) gh.nodes[n / 2] = 0.0;

  double total = 0.0;
  for (double w : gh.weights) total += w;
  for (double& w : gh.weights) w /= total;
  return gh;
}

}  // namespace funcito
