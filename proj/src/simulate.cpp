#include "funcito/simulate.hpp"

#include <cmath>

#include "funcito/errors.hpp"
#include "funcito/rng.hpp"

namespace funcito {

void SimulationConfig::validate() const {
  if (dim < 1) throw ConfigError("simulation dimension must be >= 1");
  if (!(horizon > 0.0)) throw ConfigError("simulation horizon must be positive");
  if (steps < 1) throw ConfigError("simulation needs at least one step");
  if (model == Model::ScaledBrownian && !(scale != 0.0))
    throw ConfigError("scaled Brownian model needs a nonzero scale");
  if (model == Model::StateDependent && !sigma)
    throw ConfigError("state-dependent model needs a sigma function");
  if (!x0.empty() && x0.size() != static_cast<std::size_t>(dim))
    throw ConfigError("x0 dimension mismatch");
}

namespace {

GridPath uniform_grid(int dim, double horizon, std::size_t steps) {
  GridPath g;
  g.dim = dim;
  g.times.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    g.times[i] = horizon * (static_cast<double>(i) / static_cast<double>(steps));
  g.values.assign((steps + 1) * dim, 0.0);
  return g;
}

Mat eval_sigma(const SimulationConfig& cfg, double t, std::span<const double> x) {
  const int d = cfg.dim;
  if (cfg.model == SimulationConfig::Model::ScaledBrownian) {
    Mat s(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) s[i * d + i] = cfg.scale;
    return s;
  }
  Mat s = cfg.sigma(t, x);
  if (s.size() != static_cast<std::size_t>(d) * d)
    throw SimulationError("sigma returned a matrix of wrong size");
  return s;
}

}  // namespace

LiftedPath sample_brownian(const SimulationConfig& cfg, std::size_t path_index) {
  cfg.validate();
  const int d = cfg.dim;
  const std::size_t n = cfg.steps;
  const double dt = cfg.horizon / static_cast<double>(n);
  const double sdt = std::sqrt(dt);

  GridPath x = uniform_grid(d, cfg.horizon, n);
  if (!cfg.x0.empty())
    for (int k = 0; k < d; ++k) x.values[k] = cfg.x0[k];

  NormalStream z(cfg.seed, path_index);
  for (std::size_t i = 0; i < n; ++i) {
    auto cur = x.value(i);
    auto nxt = x.value(i + 1);
    for (int k = 0; k < d; ++k) nxt[k] = cur[k] + sdt * z.next();
  }

  GridPath v = uniform_grid(d * d, cfg.horizon, n);
  for (std::size_t i = 0; i <= n; ++i) {
    auto vi = v.value(i);
    for (int k = 0; k < d; ++k) vi[k * d + k] = 1.0;
  }
  return LiftedPath(std::move(x), std::move(v));
}

LiftedPath sample_ito_process(const SimulationConfig& cfg, std::size_t path_index) {
  cfg.validate();
  if (cfg.model == SimulationConfig::Model::Brownian)
    throw ConfigError("sample_ito_process expects a non-Brownian model");
  const int d = cfg.dim;
  const std::size_t n = cfg.steps;
  const double dt = cfg.horizon / static_cast<double>(n);
  const double sdt = std::sqrt(dt);

  GridPath x = uniform_grid(d, cfg.horizon, n);
  GridPath v = uniform_grid(d * d, cfg.horizon, n);
  if (!cfg.x0.empty())
    for (int k = 0; k < d; ++k) x.values[k] = cfg.x0[k];

  NormalStream z(cfg.seed, path_index);
  Vec dw(d);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = x.times[i];
    auto xi = x.value(i);
    const Mat s = eval_sigma(cfg, t, xi);
    if (std::abs(determinant(s, d)) < cfg.det_floor)
      throw SimulationError("sigma is singular (|det| below det_floor): the nondegeneracy "
                            "assumption of the model is violated");
    // A = sigma sigma^T
    auto vi = v.value(i);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += s[r * d + k] * s[c * d + k];
        vi[r * d + c] = acc;
      }
    if (i == n) break;
    for (int k = 0; k < d; ++k) dw[k] = sdt * z.next();
    auto nxt = x.value(i + 1);
    for (int r = 0; r < d; ++r) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += s[r * d + k] * dw[k];
      nxt[r] = xi[r] + acc;
    }
  }
  return LiftedPath(std::move(x), std::move(v));
}

LiftedPath sample_path(const SimulationConfig& cfg, std::size_t path_index) {
  if (cfg.model == SimulationConfig::Model::Brownian) return sample_brownian(cfg, path_index);
  return sample_ito_process(cfg, path_index);
}

Mat realized_qv(const LiftedPath& p) {
  const int d = p.dim();
  Mat q(static_cast<std::size_t>(d) * d, 0.0);
  std::vector<KahanSum> acc(q.size());
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    auto a = p.x().value(i);
    auto b = p.x().value(i + 1);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) acc[r * d + c].add((b[r] - a[r]) * (b[c] - a[c]));
  }
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = acc[k].value();
  return q;
}

}  // namespace funcito
