#include "funcito/linalg.hpp"

#include <Eigen/Dense>

namespace funcito {

std::pair<double, double> sym_eig_range(std::span<const double> m, int d) {
  if (d == 1) return {m[0], m[0]};
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      m.data(), d, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(d - 1)};
}

double determinant(std::span<const double> m, int d) {
  if (d == 1) return m[0];
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      m.data(), d, d);
  return a.determinant();
}

}  // namespace funcito
