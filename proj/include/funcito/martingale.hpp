#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "funcito/finite_diff.hpp"
#include "funcito/functional.hpp"
#include "funcito/ito.hpp"
#include "funcito/simulate.hpp"

namespace funcito {

struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(samples)
  std::size_t samples = 0;
};
MCEstimate mc_estimate(const Vec& samples);

// A martingale Y(t) = E[H | F_t] packaged as a non-anticipative functional
// of the path, together with the terminal payoff H and, when available, the
// anticipative Malliavin derivative of H.
struct MartingaleFunctional {
  Functional base;  // evaluates Y(t) on a prefix; base.max_time = T
  double horizon = 1.0;
  std::function<double(const GridPath&)> terminal_payoff;  // H on the full path
  // Analytic hedge gradient (vertical derivative of Y), when cheaper or more
  // exact than finite differences through base.evaluate.
  std::function<Vec(const LiftedPath&)> hedge_gradient;
  // D_t H on the full path (anticipative); absent when unknown.
  std::function<Vec(const GridPath&, double)> malliavin_derivative;
  // E[D_tH | F_t] as a function of (x(t), t); for H = g(X(T)) this is the
  // same Gaussian smoothing applied to g'. Needed by lifting_check.
  std::function<double(double, double)> malliavin_conditional;

  bool has_malliavin() const { return static_cast<bool>(malliavin_conditional); }
};

// ---------------------------------------------------------------------------
// Constructors (Brownian model, d = 1)

enum class TerminalPayoff { X, X2, ExpCentered };

// Y(t) = sum_k w_k g(x(t) + sqrt(T-t) z_k) over Gauss-Hermite nodes; the
// hedge gradient applies the same smoothing to g'. Throws ContractError for
// fewer than 5 nodes.
MartingaleFunctional conditional_expectation_functional(TerminalPayoff payoff, double horizon,
                                                        int quadrature_nodes = 64);
MartingaleFunctional conditional_expectation_functional(
    const std::string& id, std::function<double(double)> g, std::function<double(double)> gprime,
    double horizon, int quadrature_nodes = 64);

// Y(t) = f(x(t_1-), ..., x(t_n-)) (x(t) - x(t_n-)) 1_{t >= t_n}: the
// stochastic integral of the cylindrical integrand f(...) 1_{t > t_n}.
MartingaleFunctional cylindrical_increment_functional(std::vector<double> marks,
                                                      std::function<double(std::span<const double>)> f,
                                                      double horizon);

// The Doleans exponential as its own martingale: hedge equals the value.
MartingaleFunctional doleans_martingale(double horizon);

// Resolves martingale ids: cexp:x | cexp:x2 | cexp:exp | doleans |
// cylinc:t1,t2,... (f = 1). Throws ConfigError on unknown ids.
MartingaleFunctional martingale_lookup(const std::string& id, double horizon,
                                       int quadrature_nodes = 64);

// ---------------------------------------------------------------------------
// Operations

struct HedgeConfig {
  JetSource jets = JetSource::Analytic;  // Analytic falls back to FD if no gradient
  FDConfig fd;
};

// phi(t_i) = vertical derivative of Y at the path prefix ending at t_i,
// for every grid time. Strictly non-anticipating.
std::vector<Vec> hedge_process(const MartingaleFunctional& Y, const LiftedPath& p,
                               const HedgeConfig& cfg);

// Y(T) - Y(0) - sum_i phi(t_i) . dX_i with phi from hedge_process.
double representation_residual(const MartingaleFunctional& Y, const LiftedPath& p,
                               const HedgeConfig& cfg);

// E[Y(T) Z(T)] vs E[int grad_Y grad_Z d[X]] over the same seeded paths
// (both martingales centered at their t = 0 value).
struct IbpResult {
  MCEstimate lhs;
  MCEstimate rhs;
  double discrepancy = 0.0;     // |lhs.mean - rhs.mean|
  double combined_stderr = 0.0; // sqrt(se_l^2 + se_r^2)
  bool pass = false;            // discrepancy <= 4 * combined stderr
};
IbpResult integration_by_parts_mc(const MartingaleFunctional& Y, const MartingaleFunctional& Z,
                                  const SimulationConfig& sim, const HedgeConfig& cfg);

// Lifting check: at each checkpoint, hedge gradient of E[H|F_t] by finite
// differences (left side) against the Gaussian smoothing of g' (right side).
struct LiftingReport {
  std::vector<double> checkpoints;
  double max_rel_discrepancy = 0.0;
  std::size_t paths = 0;
};
LiftingReport lifting_check(const MartingaleFunctional& Y, const SimulationConfig& sim,
                            const HedgeConfig& cfg, int checkpoints = 8);

// ---------------------------------------------------------------------------
// Random cylindrical integrands (inverse-property checks)

struct RandomIntegrand {
  MartingaleFunctional mf;
  std::vector<double> marks;
  Vec coeff;  // c0 then (amplitude, frequency, phase) per mark

  // Independent evaluation of the integrand phi(t) = f(marks) 1_{t >= t_n}
  // straight from the stored coefficients.
  double phi(const GridPath& x, double t) const;
};
RandomIntegrand random_cylindrical_integrand(std::uint64_t seed, std::uint64_t index,
                                             double horizon, std::size_t grid_steps);

// ---------------------------------------------------------------------------
// Nested Monte Carlo oracle for the lookback payoff H = max_t X(t)
// (experimental: the maximum sits on the vertical-differentiability
// boundary; no closed form is asserted, results are informational).

struct NestedLiftingReport {
  std::vector<double> checkpoints;
  std::vector<MCEstimate> left;   // bump-and-resimulate hedge
  std::vector<MCEstimate> right;  // inner-MC estimate of E[D_tH | F_t]
  std::size_t outer_paths = 0;
  std::size_t inner_paths = 0;
};
NestedLiftingReport lookback_lifting_oracle(const SimulationConfig& sim, std::size_t inner_paths,
                                            double bump, int checkpoints);

}  // namespace funcito
