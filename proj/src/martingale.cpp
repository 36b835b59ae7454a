#include "funcito/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "funcito/errors.hpp"
#include "funcito/parallel.hpp"
#include "funcito/quadrature.hpp"
#include "funcito/rng.hpp"

namespace funcito {

MCEstimate mc_estimate(const Vec& samples) {
  if (samples.size() < 2) throw ContractError("Monte Carlo estimate needs >= 2 samples");
  const double n = static_cast<double>(samples.size());
  KahanSum s;
  for (double x : samples) s.add(x);
  const double mean = s.value() / n;
  KahanSum sq;
  for (double x : samples) sq.add((x - mean) * (x - mean));
  const double var = sq.value() / (n - 1.0);
  return MCEstimate{mean, std::sqrt(var / n), samples.size()};
}

// ---------------------------------------------------------------------------
// Constructors

MartingaleFunctional conditional_expectation_functional(
    const std::string& id, std::function<double(double)> g, std::function<double(double)> gprime,
    double horizon, int quadrature_nodes) {
  if (quadrature_nodes < 5) throw ContractError("conditional expectation needs >= 5 nodes");
  if (!(horizon > 0.0)) throw ContractError("conditional expectation needs a positive horizon");
  const GaussHermite gh = gauss_hermite(quadrature_nodes);
  const double T = horizon;

  auto smooth = [gh, T](const std::function<double(double)>& fn, double x, double t) {
    const double s = std::sqrt(std::max(0.0, T - t));
    return gh.integrate([&](double z) { return fn(x + s * z); });
  };

  MartingaleFunctional mf;
  mf.horizon = T;
  mf.base.id = id;
  mf.base.declared_class = Functional::Regularity::C12Bounded;
  mf.base.max_time = T;
  mf.base.evaluate = [smooth, g](const LiftedPath& p) {
    return smooth(g, p.x().endpoint_scalar(), p.horizon());
  };
  mf.terminal_payoff = [g](const GridPath& x) { return g(x.endpoint_scalar()); };
  mf.hedge_gradient = [smooth, gprime](const LiftedPath& p) {
    return Vec{smooth(gprime, p.x().endpoint_scalar(), p.horizon())};
  };
  mf.malliavin_derivative = [gprime](const GridPath& x, double) {
    return Vec{gprime(x.endpoint_scalar())};
  };
  mf.malliavin_conditional = [smooth, gprime](double x, double t) { return smooth(gprime, x, t); };
  return mf;
}

MartingaleFunctional conditional_expectation_functional(TerminalPayoff payoff, double horizon,
                                                        int quadrature_nodes) {
  const double T = horizon;
  switch (payoff) {
    case TerminalPayoff::X:
      return conditional_expectation_functional(
          "cexp:x", [](double y) { return y; }, [](double) { return 1.0; }, T, quadrature_nodes);
    case TerminalPayoff::X2:
      return conditional_expectation_functional(
          "cexp:x2", [](double y) { return y * y; }, [](double y) { return 2.0 * y; }, T,
          quadrature_nodes);
    case TerminalPayoff::ExpCentered:
      return conditional_expectation_functional(
          "cexp:exp", [T](double y) { return std::exp(y - 0.5 * T); },
          [T](double y) { return std::exp(y - 0.5 * T); }, T, quadrature_nodes);
  }
  throw ContractError("unknown terminal payoff");
}

MartingaleFunctional cylindrical_increment_functional(
    std::vector<double> marks, std::function<double(std::span<const double>)> f, double horizon) {
  if (marks.empty() || marks.back() >= horizon)
    throw DomainError("cylindrical increment needs marks inside (0, T)");
  std::ostringstream os;
  os << "cylinc:";
  for (std::size_t i = 0; i < marks.size(); ++i) os << (i ? "," : "") << marks[i];

  MartingaleFunctional mf;
  mf.horizon = horizon;
  mf.base = cylindrical_functional(
      os.str(), marks, f, [](std::span<const double> y) { return y[0]; },
      [](std::span<const double>) { return Vec{1.0}; },
      [](std::span<const double>) { return Mat{0.0}; });
  mf.base.max_time = horizon;
  const std::vector<double> ms = marks;
  auto ff = f;
  mf.terminal_payoff = [ms, ff](const GridPath& x) {
    Vec mv;
    mv.reserve(ms.size());
    for (double tk : ms) {
      Vec l = x.left_limit_at(tk);
      mv.insert(mv.end(), l.begin(), l.end());
    }
    const Vec last = x.left_limit_at(ms.back());
    return ff(mv) * (x.endpoint_scalar() - last[0]);
  };
  mf.hedge_gradient = [base = mf.base](const LiftedPath& p) {
    return base.analytic_jet(p).gradient;
  };
  return mf;
}

MartingaleFunctional doleans_martingale(double horizon) {
  MartingaleFunctional mf;
  mf.horizon = horizon;
  mf.base = doleans_functional();
  mf.base.max_time = horizon;
  const double T = horizon;
  mf.terminal_payoff = [T](const GridPath& x) { return std::exp(x.endpoint_scalar() - 0.5 * T); };
  mf.hedge_gradient = [base = mf.base](const LiftedPath& p) {
    return base.analytic_jet(p).gradient;  // hedge equals the value
  };
  mf.malliavin_derivative = [T](const GridPath& x, double) {
    return Vec{std::exp(x.endpoint_scalar() - 0.5 * T)};
  };
  mf.malliavin_conditional = [](double x, double t) { return std::exp(x - 0.5 * t); };
  return mf;
}

MartingaleFunctional martingale_lookup(const std::string& id, double horizon,
                                       int quadrature_nodes) {
  if (id == "cexp:x")
    return conditional_expectation_functional(TerminalPayoff::X, horizon, quadrature_nodes);
  if (id == "cexp:x2")
    return conditional_expectation_functional(TerminalPayoff::X2, horizon, quadrature_nodes);
  if (id == "cexp:exp")
    return conditional_expectation_functional(TerminalPayoff::ExpCentered, horizon,
                                              quadrature_nodes);
  if (id == "doleans") return doleans_martingale(horizon);
  if (id.rfind("cylinc:", 0) == 0) {
    std::vector<double> marks;
    std::istringstream is(id.substr(7));
    std::string cell;
    while (std::getline(is, cell, ',')) marks.push_back(std::stod(cell));
    return cylindrical_increment_functional(
        marks, [](std::span<const double>) { return 1.0; }, horizon);
  }
  throw ConfigError("unknown martingale id: " + id);
}

// ---------------------------------------------------------------------------
// Operations

namespace {

Vec hedge_at(const MartingaleFunctional& Y, PrefixWalker& walker, const HedgeConfig& cfg) {
  if (cfg.jets == JetSource::Analytic) {
    if (Y.hedge_gradient) return Y.hedge_gradient(walker.path());
    if (Y.base.has_jet()) return Y.base.analytic_jet(walker.path()).gradient;
  }
  return vertical_derivative_fd(Y.base, walker, cfg.fd).gradient;
}

void require_full_span(const MartingaleFunctional& Y, const LiftedPath& p) {
  if (p.horizon() != Y.horizon)
    throw DomainError("path must span [0, T] of the martingale functional");
}

}  // namespace

std::vector<Vec> hedge_process(const MartingaleFunctional& Y, const LiftedPath& p,
                               const HedgeConfig& cfg) {
  require_full_span(Y, p);
  std::vector<Vec> phi;
  phi.reserve(p.size());
  PrefixWalker walker(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    phi.push_back(hedge_at(Y, walker, cfg));
    walker.advance();
  }
  return phi;
}

double representation_residual(const MartingaleFunctional& Y, const LiftedPath& p,
                               const HedgeConfig& cfg) {
  require_full_span(Y, p);
  const int d = p.dim();
  PrefixWalker walker(p);
  const double y0 = Y.base.evaluate(walker.path());
  KahanSum integral;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Vec phi = hedge_at(Y, walker, cfg);
    auto xi = p.x().value(i);
    auto xj = p.x().value(i + 1);
    double inc = 0.0;
    for (int k = 0; k < d; ++k) inc += phi[k] * (xj[k] - xi[k]);
    integral.add(inc);
    walker.advance();
  }
  const double yT = Y.base.evaluate(p);
  return yT - y0 - integral.value();
}

IbpResult integration_by_parts_mc(const MartingaleFunctional& Y, const MartingaleFunctional& Z,
                                  const SimulationConfig& sim, const HedgeConfig& cfg) {
  const std::size_t m = sim.path_count;
  if (m < 2) throw ContractError("integration by parts needs >= 2 paths");
  Vec lhs(m), rhs(m);
  parallel_for(m, [&](std::size_t w) {
    const LiftedPath p = sample_path(sim, w);
    const int d = p.dim();
    PrefixWalker walker(p);
    const double y0 = Y.base.evaluate(walker.path());
    const double z0 = Z.base.evaluate(walker.path());
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const Vec gy = hedge_at(Y, walker, cfg);
      const Vec gz = hedge_at(Z, walker, cfg);
      const double dt = p.time(i + 1) - p.time(i);
      (void)d;
      acc.add(quad_form(gy, p.v().value(i), gz) * dt);
      walker.advance();
    }
    lhs[w] = (Y.base.evaluate(p) - y0) * (Z.base.evaluate(p) - z0);
    rhs[w] = acc.value();
  });
  IbpResult r;
  r.lhs = mc_estimate(lhs);
  r.rhs = mc_estimate(rhs);
  r.discrepancy = std::abs(r.lhs.mean - r.rhs.mean);
  r.combined_stderr = std::hypot(r.lhs.stderr_, r.rhs.stderr_);
  r.pass = r.discrepancy <= 4.0 * r.combined_stderr;
  return r;
}

LiftingReport lifting_check(const MartingaleFunctional& Y, const SimulationConfig& sim,
                            const HedgeConfig& cfg, int checkpoints) {
  if (!Y.has_malliavin()) throw ContractError("lifting check needs a Malliavin derivative");
  if (checkpoints < 1) throw ContractError("lifting check needs >= 1 checkpoint");
  LiftingReport rep;
  const double T = Y.horizon;
  for (int j = 1; j <= checkpoints; ++j)
    rep.checkpoints.push_back(T * static_cast<double>(j) / static_cast<double>(checkpoints + 1));

  const std::size_t m = sim.path_count;
  Vec worst(m, 0.0);
  parallel_for(m, [&](std::size_t w) {
    const LiftedPath p = sample_path(sim, w);
    double path_worst = 0.0;
    for (double tj : rep.checkpoints) {
      const LiftedPath prefix = restrict_path(p, tj);
      // left side: pathwise vertical derivative of E[H|F_t]
      const double left = vertical_derivative_fd(Y.base, prefix, cfg.fd).gradient[0];
      // right side: conditional expectation of the Malliavin derivative
      const double right =
          Y.malliavin_conditional(prefix.x().endpoint_scalar(), prefix.horizon());
      path_worst =
          std::max(path_worst, std::abs(left - right) / (1.0 + std::abs(right)));
    }
    worst[w] = path_worst;
  });
  rep.max_rel_discrepancy = *std::max_element(worst.begin(), worst.end());
  rep.paths = m;
  return rep;
}

// ---------------------------------------------------------------------------
// Random cylindrical integrands

double RandomIntegrand::phi(const GridPath& x, double t) const {
  if (t < marks.back()) return 0.0;
  double f = coeff[0];
  for (std::size_t j = 0; j < marks.size(); ++j) {
    const double y = x.value_at(marks[j])[0];
    f += coeff[1 + 3 * j] * std::cos(coeff[2 + 3 * j] * y + coeff[3 + 3 * j]);
  }
  return f;
}

RandomIntegrand random_cylindrical_integrand(std::uint64_t seed, std::uint64_t index,
                                             double horizon, std::size_t grid_steps) {
  UniformStream u(seed ^ 0x5bd1e995u, index);
  const double mesh = horizon / static_cast<double>(grid_steps);

  const int n_marks = 1 + static_cast<int>(u.next() * 3.0);
  // distinct interior cells; marks at cell midpoints, never on the grid
  std::vector<std::size_t> cells;
  const std::size_t lo = grid_steps / 10 + 1;
  const std::size_t hi = grid_steps - grid_steps / 10 - 2;
  while (cells.size() < static_cast<std::size_t>(n_marks)) {
    const std::size_t c = lo + static_cast<std::size_t>(u.next() * static_cast<double>(hi - lo));
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  }
  std::sort(cells.begin(), cells.end());

  RandomIntegrand ri;
  for (std::size_t c : cells) ri.marks.push_back((static_cast<double>(c) + 0.5) * mesh);
  ri.coeff.push_back(0.5 + u.next());  // constant term
  for (int j = 0; j < n_marks; ++j) {
    ri.coeff.push_back(2.0 * u.next() - 1.0);        // amplitude
    ri.coeff.push_back(0.5 + 1.5 * u.next());        // frequency
    ri.coeff.push_back(2.0 * 3.141592653589793 * u.next());  // phase
  }

  const Vec coeff = ri.coeff;
  const std::size_t nm = ri.marks.size();
  auto f = [coeff, nm](std::span<const double> marks_x) {
    double s = coeff[0];
    for (std::size_t j = 0; j < nm; ++j)
      s += coeff[1 + 3 * j] * std::cos(coeff[2 + 3 * j] * marks_x[j] + coeff[3 + 3 * j]);
    return s;
  };
  ri.mf = cylindrical_increment_functional(ri.marks, f, horizon);
  return ri;
}

// ---------------------------------------------------------------------------
// Lookback nested oracle

NestedLiftingReport lookback_lifting_oracle(const SimulationConfig& sim, std::size_t inner_paths,
                                            double bump, int checkpoints) {
  if (sim.model != SimulationConfig::Model::Brownian || sim.dim != 1)
    throw ContractError("lookback oracle supports one-dimensional Brownian paths");
  const std::size_t m = sim.path_count;
  const std::size_t n = sim.steps;
  const double dt = sim.horizon / static_cast<double>(n);
  const double sdt = std::sqrt(dt);

  NestedLiftingReport rep;
  rep.outer_paths = m;
  rep.inner_paths = inner_paths;
  std::vector<std::size_t> cp_index;
  for (int j = 1; j <= checkpoints; ++j) {
    const std::size_t c = n * static_cast<std::size_t>(j) / static_cast<std::size_t>(checkpoints + 1);
    cp_index.push_back(std::max<std::size_t>(1, c));
    rep.checkpoints.push_back(dt * static_cast<double>(cp_index.back()));
  }

  std::vector<Vec> left(cp_index.size(), Vec(m, 0.0));
  std::vector<Vec> right(cp_index.size(), Vec(m, 0.0));

  parallel_for(m, [&](std::size_t w) {
    const LiftedPath p = sample_brownian(sim, w);
    for (std::size_t jc = 0; jc < cp_index.size(); ++jc) {
      const std::size_t c = cp_index[jc];
      double m_pre = p.x().scalar(0);
      for (std::size_t i = 1; i <= c; ++i) m_pre = std::max(m_pre, p.x().scalar(i));
      const double xc = p.x().scalar(c);

      // inner continuations share noise across the bumped re-evaluations
      KahanSum up, down, dfrac;
      for (std::size_t q = 0; q < inner_paths; ++q) {
        NormalStream z(sim.seed ^ 0x7f4a7c15u, (w << 20) ^ (q + 1));
        double s = 0.0, smax = 0.0;
        for (std::size_t i = c; i < n; ++i) {
          s += sdt * z.next();
          smax = std::max(smax, s);
        }
        up.add(std::max(m_pre, xc + bump + smax));
        down.add(std::max(m_pre, xc - bump + smax));
        dfrac.add(xc + smax >= m_pre ? 1.0 : 0.0);
      }
      const double ni = static_cast<double>(inner_paths);
      left[jc][w] = (up.value() - down.value()) / (2.0 * bump * ni);
      right[jc][w] = dfrac.value() / ni;
    }
  });

  for (std::size_t jc = 0; jc < cp_index.size(); ++jc) {
    rep.left.push_back(mc_estimate(left[jc]));
    rep.right.push_back(mc_estimate(right[jc]));
  }
  return rep;
}

}  // namespace funcito
