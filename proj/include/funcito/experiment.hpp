#pragma once

#include <optional>
#include <string>
#include <vector>

#include "funcito/finite_diff.hpp"
#include "funcito/ito.hpp"
#include "funcito/martingale.hpp"
#include "funcito/report.hpp"
#include "funcito/simulate.hpp"

namespace funcito {

enum class ExperimentKind { ItoCheck, Hedge, Ibp, Lifting, Approx, JetCheck, Study };

ExperimentKind parse_kind(const std::string& s);
std::string kind_name(ExperimentKind k);

// A fully resolved experiment: seeded simulation, functional selection,
// estimator settings, tolerances and output routing. Default tolerances are
// the built-in per-kind ones; `tolerance` overrides the headline metric.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::ItoCheck;
  std::string functional_id = "quadratic_martingale";
  std::string functional_id_z;  // second leg of ibp; defaults to functional_id
  SimulationConfig sim;
  FDConfig fd;
  QvMode qv_mode = QvMode::Realized;
  JetSource jets = JetSource::Analytic;
  int quadrature_nodes = 64;
  int checkpoints = 8;                    // lifting
  std::vector<std::size_t> grid_sizes;    // study; >= 3, geometric
  std::string study_kind = "ito-check";   // ito-check | hedge
  std::string approx_path = "builtin:three_jumps";
  int approx_nmax = 8;
  bool experimental = false;
  std::optional<double> tolerance;
  std::string dump_paths;  // per-path ito decompositions CSV, "" = off
  std::string out;         // report file, "" = stdout only
  std::string format = "csv";

  void validate() const;  // throws ConfigError
};

// Parses a flat JSON key-value config into a spec (missing keys keep
// defaults).
ExperimentSpec spec_from_json_file(const std::string& path);
ExperimentSpec spec_from_json_text(const std::string& text);

// Runs the experiment, writes the report when spec.out is set (atomically),
// and returns it. Deterministic given spec.sim.seed.
ExperimentReport run(const ExperimentSpec& spec);

// RMS residual per grid size with a fitted log-log slope. Residuals below
// 1e-12 are treated as round-off floor and the slope fit is skipped.
ExperimentReport convergence_study(const ExperimentSpec& spec);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<std::size_t>& x, const Vec& y);

// Built-in cadlag test paths for approximation experiments:
//   three_jumps  - piecewise constant, jumps of sizes 1, 0.4, 0.05
//   pc_two_jumps - piecewise constant, jumps of sizes 1, 0.4
//   linear       - continuous ramp
LiftedPath builtin_path(const std::string& name);

}  // namespace funcito
