#pragma once

#include <vector>

#include "funcito/path.hpp"
#include "funcito/simulate.hpp"

namespace funcito::testing {

// One-dimensional lifted path with constant quadratic-variation density.
inline LiftedPath make_lifted(std::vector<double> times, std::vector<double> xs, double v = 1.0) {
  GridPath x;
  x.dim = 1;
  x.times = times;
  x.values = std::move(xs);
  GridPath vp;
  vp.dim = 1;
  vp.times = std::move(times);
  vp.values.assign(vp.times.size(), v);
  return LiftedPath(std::move(x), std::move(vp));
}

inline LiftedPath uniform_lifted(std::size_t steps, double horizon,
                                 const std::function<double(double)>& f, double v = 1.0) {
  std::vector<double> times(steps + 1), xs(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    times[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    xs[i] = f(times[i]);
  }
  return make_lifted(std::move(times), std::move(xs), v);
}

inline LiftedPath brownian(std::uint64_t seed, std::size_t path_index, std::size_t steps,
                           double horizon = 1.0) {
  SimulationConfig cfg;
  cfg.model = SimulationConfig::Model::Brownian;
  cfg.steps = steps;
  cfg.horizon = horizon;
  cfg.seed = seed;
  return sample_brownian(cfg, path_index);
}

}  // namespace funcito::testing
