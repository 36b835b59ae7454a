#pragma once

#include "funcito/linalg.hpp"

namespace funcito {

// Gauss-Hermite rule in probabilists' normalization: sum_k w_k f(z_k)
// integrates f against the standard normal density exactly for polynomials
// of degree <= 2n-1. Nodes are antisymmetric, weights sum to 1 exactly.
struct GaussHermite {
  Vec nodes;
  Vec weights;

  template <typename F>
  double integrate(F&& f) const {
    KahanSum s;
    for (std::size_t k = 0; k < nodes.size(); ++k) s.add(weights[k] * f(nodes[k]));
    return s.value();
  }
};

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
// Throws ContractError for n < 1.
GaussHermite gauss_hermite(int n);

}  // namespace funcito
