#include <algorithm>
#include <cmath>
#include <sstream>

#include "funcito/errors.hpp"
#include "funcito/functional.hpp"

namespace funcito {

namespace {

double last_v_scalar(const LiftedPath& p) { return p.v().scalar(p.size() - 1); }

void require_dim1(const LiftedPath& p, const char* who) {
  if (p.dim() != 1) throw ContractError(std::string(who) + " supports d = 1 only");
}

// x(t_k-) per the left-limit convention (flagged limit on-grid, held value
// otherwise). Appends dim doubles to out.
void append_left_limit(const LiftedPath& p, double t, Vec& out) {
  Vec l = p.x().left_limit_at(t);
  out.insert(out.end(), l.begin(), l.end());
}

}  // namespace

Functional smooth_functional(std::string id, ScalarField f, ScalarField df_dt, VecField grad,
                             MatField hess) {
  Functional F;
  F.id = std::move(id);
  F.declared_class = Functional::Regularity::C12Bounded;
  F.evaluate = [f](const LiftedPath& p) {
    return f(p.horizon(), p.x().value(p.size() - 1));
  };
  F.analytic_jet = [df_dt, grad, hess](const LiftedPath& p) {
    const double t = p.horizon();
    auto xe = p.x().value(p.size() - 1);
    return DerivativeJet{df_dt(t, xe), grad(t, xe), hess(t, xe)};
  };
  return F;
}

Functional cylindrical_functional(std::string id, std::vector<double> marks,
                                  std::function<double(std::span<const double>)> g,
                                  std::function<double(std::span<const double>)> h,
                                  std::function<Vec(std::span<const double>)> h_grad,
                                  std::function<Mat(std::span<const double>)> h_hess) {
  if (marks.empty()) throw DomainError("cylindrical functional needs at least one mark");
  for (std::size_t i = 1; i < marks.size(); ++i)
    if (!(marks[i] > marks[i - 1])) throw DomainError("marks must be strictly increasing");

  const double t_last = marks.back();
  // shared between value and jet
  auto parts = [marks, t_last, g](const LiftedPath& p, Vec& increment) -> double {
    // returns g(marks), fills increment = x(t) - x(t_n-); caller checks t >= t_n
    Vec mark_values;
    mark_values.reserve(marks.size() * p.dim());
    for (double tk : marks) append_left_limit(p, tk, mark_values);
    const double gv = g(mark_values);
    const Vec last_mark = p.x().left_limit_at(t_last);
    auto xe = p.x().value(p.size() - 1);
    increment.resize(xe.size());
    for (std::size_t k = 0; k < xe.size(); ++k) increment[k] = xe[k] - last_mark[k];
    return gv;
  };

  Functional F;
  F.id = std::move(id);
  F.declared_class = Functional::Regularity::C12Bounded;
  F.evaluate = [parts, h, t_last](const LiftedPath& p) {
    if (p.horizon() < t_last) return 0.0;
    Vec inc;
    const double gv = parts(p, inc);
    return h(inc) * gv;
  };
  F.analytic_jet = [parts, h_grad, h_hess, t_last](const LiftedPath& p) {
    const int d = p.dim();
    DerivativeJet jet;
    jet.gradient.assign(d, 0.0);
    jet.hessian.assign(static_cast<std::size_t>(d) * d, 0.0);
    if (p.horizon() < t_last) return jet;
    Vec inc;
    const double gv = parts(p, inc);
    Vec gr = h_grad(inc);
    Mat he = h_hess(inc);
    for (int k = 0; k < d; ++k) jet.gradient[k] = gr[k] * gv;
    for (int k = 0; k < d * d; ++k) jet.hessian[k] = he[k] * gv;
    return jet;
  };
  return F;
}

Functional qv_integral_functional(std::string id, std::function<double(double)> g) {
  Functional F;
  F.id = std::move(id);
  F.declared_class = Functional::Regularity::C12Bounded;
  F.evaluate = [g](const LiftedPath& p) {
    require_dim1(p, "qv_integral");
    KahanSum s;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      s.add(g(p.x().scalar(i)) * p.v().scalar(i) * (p.time(i + 1) - p.time(i)));
    return s.value();
  };
  F.analytic_jet = [g](const LiftedPath& p) {
    require_dim1(p, "qv_integral");
    DerivativeJet jet;
    jet.horizontal = g(p.x().endpoint_scalar()) * last_v_scalar(p);
    jet.gradient = {0.0};
    jet.hessian = {0.0};
    return jet;
  };
  return F;
}

Functional quadratic_martingale_functional() {
  Functional F;
  F.id = "quadratic_martingale";
  F.declared_class = Functional::Regularity::C12Bounded;
  F.evaluate = [](const LiftedPath& p) {
    require_dim1(p, "quadratic_martingale");
    const double xe = p.x().endpoint_scalar();
    return xe * xe - p.integral_v_total()[0];
  };
  F.analytic_jet = [](const LiftedPath& p) {
    require_dim1(p, "quadratic_martingale");
    return DerivativeJet{-last_v_scalar(p), {2.0 * p.x().endpoint_scalar()}, {2.0}};
  };
  return F;
}

Functional doleans_functional() {
  Functional F;
  F.id = "doleans";
  F.declared_class = Functional::Regularity::C12Bounded;
  F.evaluate = [](const LiftedPath& p) {
    require_dim1(p, "doleans");
    return std::exp(p.x().endpoint_scalar() - 0.5 * p.integral_v_total()[0]);
  };
  F.analytic_jet = [](const LiftedPath& p) {
    require_dim1(p, "doleans");
    const double val = std::exp(p.x().endpoint_scalar() - 0.5 * p.integral_v_total()[0]);
    return DerivativeJet{-0.5 * last_v_scalar(p) * val, {val}, {val}};
  };
  return F;
}

// ---------------------------------------------------------------------------
// Obstruction examples (section on failures of regularity)

Functional delayed_functional(double eps) {
  if (!(eps > 0.0)) throw DomainError("delayed functional needs eps > 0");
  Functional F;
  std::ostringstream os;
  os << "delayed:" << eps;
  F.id = os.str();
  F.declared_class = Functional::Regularity::Irregular;
  F.evaluate = [eps](const LiftedPath& p) {
    require_dim1(p, "delayed");
    const double u = std::max(0.0, p.horizon() - eps);
    return p.x().value_at(u)[0];
  };
  // vertical derivatives are all 0 but the horizontal derivative does not
  // exist; no jet is attached.
  return F;
}

Functional current_jump_functional() {
  Functional F;
  F.id = "current_jump";
  F.declared_class = Functional::Regularity::Irregular;  // not left-continuous
  F.evaluate = [](const LiftedPath& p) {
    require_dim1(p, "current_jump");
    const std::size_t last = p.size() - 1;
    return p.x().scalar(last) - p.x().left_limit(last)[0];
  };
  F.analytic_jet = [](const LiftedPath&) {
    return DerivativeJet{0.0, {1.0}, {0.0}};
  };
  return F;
}

Functional fixed_time_jump_functional(double t0) {
  if (!(t0 > 0.0)) throw DomainError("fixed-time jump needs t0 in (0, T)");
  Functional F;
  std::ostringstream os;
  os << "fixed_time_jump:" << t0;
  F.id = os.str();
  F.declared_class = Functional::Regularity::C00Left;
  F.evaluate = [t0](const LiftedPath& p) {
    require_dim1(p, "fixed_time_jump");
    if (p.horizon() < t0) return 0.0;
    return p.x().value_at(t0)[0] - p.x().left_limit_at(t0)[0];
  };
  // gradient 1_{t = t0}: discontinuous in t, which is the obstruction
  F.analytic_jet = [t0](const LiftedPath& p) {
    const double grad = p.horizon() == t0 ? 1.0 : 0.0;
    return DerivativeJet{0.0, {grad}, {0.0}};
  };
  return F;
}

namespace {

// max over all samples and declared left limits, excluding the endpoint value
double running_max_before_endpoint(const LiftedPath& p) {
  const std::size_t last = p.size() - 1;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < last; ++i) m = std::max(m, p.x().scalar(i));
  for (const auto& [i, left] : p.x().jump_left) {
    (void)i;
    m = std::max(m, left[0]);
  }
  return m;
}

}  // namespace

Functional running_max_functional() {
  Functional F;
  F.id = "running_max";
  F.declared_class = Functional::Regularity::C00Left;
  F.evaluate = [](const LiftedPath& p) {
    require_dim1(p, "running_max");
    return std::max(running_max_before_endpoint(p), p.x().endpoint_scalar());
  };
  // vertically non-differentiable where the endpoint attains the maximum;
  // probe one-sided behaviour with running_max_one_sided or finite differences
  return F;
}

OneSidedVertical running_max_one_sided(const LiftedPath& p, double eps, double nondiff_tol) {
  require_dim1(p, "running_max");
  const double m_prev = running_max_before_endpoint(p);
  const double y = p.x().endpoint_scalar();
  const double val = std::max(m_prev, y);
  OneSidedVertical r;
  r.right = (std::max(m_prev, y + eps) - val) / eps;
  r.left = (val - std::max(m_prev, y - eps)) / eps;
  const double central = 0.5 * (r.right + r.left);
  r.nondiff = std::abs(r.right - r.left) > nondiff_tol * (1.0 + std::abs(central));
  return r;
}

ObstructionCatalog obstruction_functionals(double eps, double t0) {
  return ObstructionCatalog{delayed_functional(eps), current_jump_functional(),
                            fixed_time_jump_functional(t0), running_max_functional()};
}

// ---------------------------------------------------------------------------
// String-id lookup

namespace {

Functional smooth_by_name(const std::string& name) {
  if (name == "x")
    return smooth_functional(
        "smooth:x", [](double, std::span<const double> x) { return x[0]; },
        [](double, std::span<const double>) { return 0.0; },
        [](double, std::span<const double>) { return Vec{1.0}; },
        [](double, std::span<const double>) { return Mat{0.0}; });
  if (name == "x2")
    return smooth_functional(
        "smooth:x2", [](double, std::span<const double> x) { return x[0] * x[0]; },
        [](double, std::span<const double>) { return 0.0; },
        [](double, std::span<const double> x) { return Vec{2.0 * x[0]}; },
        [](double, std::span<const double>) { return Mat{2.0}; });
  if (name == "t")
    return smooth_functional(
        "smooth:t", [](double t, std::span<const double>) { return t; },
        [](double, std::span<const double>) { return 1.0; },
        [](double, std::span<const double>) { return Vec{0.0}; },
        [](double, std::span<const double>) { return Mat{0.0}; });
  if (name == "tx")
    return smooth_functional(
        "smooth:tx", [](double t, std::span<const double> x) { return t * x[0]; },
        [](double, std::span<const double> x) { return x[0]; },
        [](double t, std::span<const double>) { return Vec{t}; },
        [](double, std::span<const double>) { return Mat{0.0}; });
  throw ConfigError("unknown smooth functional: " + name);
}

std::vector<double> parse_times(const std::string& list) {
  std::vector<double> out;
  std::istringstream is(list);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(std::stod(cell));
  if (out.empty()) throw ConfigError("expected a comma-separated time list");
  return out;
}

}  // namespace

Functional catalog_lookup(const std::string& id) {
  if (id == "quadratic_martingale") return quadratic_martingale_functional();
  if (id == "doleans") return doleans_functional();
  if (id == "running_max") return running_max_functional();
  if (id == "current_jump") return current_jump_functional();
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);
  if (head == "smooth") return smooth_by_name(tail);
  if (head == "qv_integral") {
    if (tail == "1")
      return qv_integral_functional("qv_integral:1", [](double) { return 1.0; });
    if (tail == "x")
      return qv_integral_functional("qv_integral:x", [](double x) { return x; });
    throw ConfigError("unknown qv_integral integrand: " + tail);
  }
  if (head == "delayed") return delayed_functional(std::stod(tail));
  if (head == "fixed_time_jump") return fixed_time_jump_functional(std::stod(tail));
  if (head == "cylindrical") {
    // increment form: h = identity, g = 1
    return cylindrical_functional(
        id, parse_times(tail), [](std::span<const double>) { return 1.0; },
        [](std::span<const double> y) { return y[0]; },
        [](std::span<const double>) { return Vec{1.0}; },
        [](std::span<const double>) { return Mat{0.0}; });
  }
  throw ConfigError("unknown functional id: " + id);
}

std::vector<std::string> catalog_jet_ids() {
  return {"smooth:x", "smooth:x2", "smooth:tx", "cylindrical:0.25",
          "qv_integral:1", "qv_integral:x", "quadratic_martingale", "doleans"};
}

}  // namespace funcito
