#pragma once

#include <cstdint>
#include <functional>

#include "funcito/path.hpp"

namespace funcito {

// Generation of discretized Ito paths (X, A) on a uniform grid. X is driven
// by d-dimensional Brownian increments; A = sigma sigma^T is stored
// piecewise-constant cadlag (the value at t_i governs [t_i, t_{i+1})).
// det(sigma) must stay away from 0: |det| < det_floor raises SimulationError.
struct SimulationConfig {
  enum class Model { Brownian, ScaledBrownian, StateDependent };

  Model model = Model::Brownian;
  int dim = 1;
  double horizon = 1.0;
  std::size_t steps = 256;
  std::uint64_t seed = 0;
  std::size_t path_count = 1;
  double scale = 1.0;  // ScaledBrownian: sigma = scale * I
  std::function<Mat(double, std::span<const double>)> sigma;  // StateDependent
  double det_floor = 1e-8;
  Vec x0;  // empty: start at the origin

  void validate() const;  // throws ConfigError
};

// Standard Brownian motion: i.i.d. Gaussian increments of variance dt per
// coordinate, A = I. Deterministic given (seed, path_index).
LiftedPath sample_brownian(const SimulationConfig& cfg, std::size_t path_index);

// Euler scheme X_{i+1} = X_i + sigma(t_i, X_i) dW_i with A_i = sigma sigma^T.
LiftedPath sample_ito_process(const SimulationConfig& cfg, std::size_t path_index);

// Dispatches on cfg.model.
LiftedPath sample_path(const SimulationConfig& cfg, std::size_t path_index);

// Realized quadratic variation sum dX dX^T over the whole grid (d x d).
Mat realized_qv(const LiftedPath& p);

}  // namespace funcito
