// funcito: numerical engine for functional Ito calculus.
//
// Subcommands: ito-check | hedge | ibp | lifting | approx | jet-check | study
// Exit codes: 0 all metrics pass, 1 tolerance failure, 2 config error,
// 3 model-assumption violation.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "funcito/errors.hpp"
#include "funcito/experiment.hpp"

namespace {

using funcito::ExperimentKind;
using funcito::ExperimentSpec;

// --config is honored before flag parsing so that flags override file values.
std::string scan_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  return {};
}

void add_common_options(CLI::App* cmd, ExperimentSpec& spec) {
  std::string ignored;
  cmd->add_option("--config", ignored, "JSON config file (flags override file values)");
  cmd->add_option("--seed", spec.sim.seed, "RNG seed");
  cmd->add_option("--paths", spec.sim.path_count, "Monte Carlo path count");
  cmd->add_option("--steps", spec.sim.steps, "grid steps per path");
  cmd->add_option("--horizon", spec.sim.horizon, "time horizon T");
  cmd->add_option("--functional", spec.functional_id, "functional / payoff id");
  cmd->add_option("--eps", spec.fd.eps_vertical, "vertical bump size");
  cmd->add_option_function<double>(
      "--h", [&spec](double h) { spec.fd.h_horizontal = h; },
      "horizontal step (default: one grid step)");
  cmd->add_option_function<std::string>(
      "--scheme",
      [&spec](const std::string& s) {
        if (s == "central")
          spec.fd.scheme = funcito::FDConfig::Scheme::Central;
        else if (s == "forward")
          spec.fd.scheme = funcito::FDConfig::Scheme::Forward;
        else
          throw CLI::ValidationError("--scheme must be central or forward");
      },
      "finite-difference scheme (central|forward)");
  cmd->add_option_function<std::string>(
      "--mode",
      [&spec](const std::string& s) {
        if (s == "realized")
          spec.qv_mode = funcito::QvMode::Realized;
        else if (s == "instantaneous")
          spec.qv_mode = funcito::QvMode::Instantaneous;
        else
          throw CLI::ValidationError("--mode must be realized or instantaneous");
      },
      "quadratic variation mode (realized|instantaneous)");
  cmd->add_option_function<std::string>(
      "--jets",
      [&spec](const std::string& s) {
        if (s == "analytic")
          spec.jets = funcito::JetSource::Analytic;
        else if (s == "fd")
          spec.jets = funcito::JetSource::FiniteDifference;
        else
          throw CLI::ValidationError("--jets must be analytic or fd");
      },
      "jet source (analytic|fd)");
  cmd->add_option_function<std::string>(
      "--model",
      [&spec](const std::string& m) {
        if (m == "brownian") {
          spec.sim.model = funcito::SimulationConfig::Model::Brownian;
        } else if (m.rfind("scaled:", 0) == 0) {
          spec.sim.model = funcito::SimulationConfig::Model::ScaledBrownian;
          spec.sim.scale = std::stod(m.substr(7));
        } else {
          throw CLI::ValidationError("--model must be brownian or scaled:<c>");
        }
      },
      "simulation model (brownian|scaled:<c>)");
  cmd->add_option_function<double>(
      "--tol", [&spec](double t) { spec.tolerance = t; }, "override the headline tolerance");
  cmd->add_option("--out", spec.out, "report output file");
  cmd->add_option("--format", spec.format, "report format (csv|json)");
  cmd->add_flag("--experimental", spec.experimental, "enable experimental payoffs");
}

int run_spec(const ExperimentSpec& spec) {
  const funcito::ExperimentReport rep = funcito::run(spec);
  std::cout << funcito::report_csv(rep);
  std::fprintf(stdout, "# wall_ms=%.1f\n", rep.wall_ms);
  for (const auto& m : rep.metrics)
    std::fprintf(stdout, "# %-36s %-12s value=%.6g tolerance=%.6g\n", m.name.c_str(),
                 m.pass ? "pass" : "FAIL", m.value, m.tolerance);
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentSpec spec;
  std::string grids;

  try {
    const std::string config_path = scan_config_path(argc, argv);
    if (!config_path.empty()) spec = funcito::spec_from_json_file(config_path);
  } catch (const funcito::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"funcito: pathwise functional calculus verification engine"};
  app.require_subcommand(1);

  auto* ito = app.add_subcommand("ito-check", "reconstruct F along paths from its jet");
  add_common_options(ito, spec);
  ito->add_option("--dump-paths", spec.dump_paths, "per-path decomposition CSV");

  auto* hedge = app.add_subcommand("hedge", "martingale representation residuals");
  add_common_options(hedge, spec);

  auto* ibp = app.add_subcommand("ibp", "integration-by-parts isometry check");
  add_common_options(ibp, spec);
  ibp->add_option("--functional-z", spec.functional_id_z, "second martingale id (default: same)");

  auto* lifting = app.add_subcommand("lifting", "Malliavin lifting check");
  add_common_options(lifting, spec);
  lifting->add_option("--checkpoints", spec.checkpoints, "number of checkpoint times");
  lifting->add_option("--nodes", spec.quadrature_nodes, "Gauss-Hermite nodes");

  auto* approx = app.add_subcommand("approx", "cadlag step-function approximation");
  add_common_options(approx, spec);
  approx->add_option("--path", spec.approx_path, "builtin:<name> or a path CSV file");
  approx->add_option("--nmax", spec.approx_nmax, "largest dyadic level N");

  auto* jet = app.add_subcommand("jet-check", "analytic jets vs finite differences");
  add_common_options(jet, spec);

  auto* study = app.add_subcommand("study", "convergence study over grid sizes");
  add_common_options(study, spec);
  study->add_option("--grids", grids, "comma-separated grid sizes");
  study->add_option("--study-kind", spec.study_kind, "ito-check | hedge");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    if (active == ito) spec.kind = ExperimentKind::ItoCheck;
    if (active == hedge) spec.kind = ExperimentKind::Hedge;
    if (active == ibp) spec.kind = ExperimentKind::Ibp;
    if (active == lifting) spec.kind = ExperimentKind::Lifting;
    if (active == approx) spec.kind = ExperimentKind::Approx;
    if (active == jet) spec.kind = ExperimentKind::JetCheck;
    if (active == study) {
      spec.kind = ExperimentKind::Study;
      if (!grids.empty()) {
        spec.grid_sizes.clear();
        std::stringstream ss(grids);
        std::string cell;
        while (std::getline(ss, cell, ',')) spec.grid_sizes.push_back(std::stoull(cell));
      }
      if (spec.grid_sizes.empty()) spec.grid_sizes = {256, 1024, 4096};
    }
    return run_spec(spec);
  } catch (const funcito::SimulationError& e) {
    std::cerr << "assumption violation: " << e.what() << '\n';
    return 3;
  } catch (const funcito::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
