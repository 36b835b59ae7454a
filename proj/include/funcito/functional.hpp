#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "funcito/path.hpp"

namespace funcito {

// Second-order jet of a non-anticipative functional at a point of the path
// space: horizontal (time-direction) derivative, endpoint gradient, endpoint
// Hessian.
struct DerivativeJet {
  double horizontal = 0.0;
  Vec gradient;  // dim
  Mat hessian;   // dim x dim, symmetric
};

// Evaluation contract for a non-anticipative functional F_t(x_t, v_t).
// `evaluate` must depend only on the path up to its horizon; functionals
// with predictable_in_v never read the final v sample.
struct Functional {
  enum class Regularity { C00Left, C12Bounded, Irregular };

  std::string id;
  Regularity declared_class = Regularity::C12Bounded;  // metadata, not verified
  bool predictable_in_v = true;
  // Horizontal extensions of arguments must stay at or below this time.
  double max_time = std::numeric_limits<double>::infinity();

  std::function<double(const LiftedPath&)> evaluate;
  std::function<DerivativeJet(const LiftedPath&)> analytic_jet;  // optional

  bool has_jet() const { return static_cast<bool>(analytic_jet); }
  double operator()(const LiftedPath& p) const { return evaluate(p); }
};

// ---------------------------------------------------------------------------
// Catalog constructors. Each returns a Functional with an analytic jet
// unless noted otherwise.

using ScalarField = std::function<double(double, std::span<const double>)>;
using VecField = std::function<Vec(double, std::span<const double>)>;
using MatField = std::function<Mat(double, std::span<const double>)>;

// F_t(x, v) = f(t, x(t)); the jet reduces to the classical derivatives.
Functional smooth_functional(std::string id, ScalarField f, ScalarField df_dt, VecField grad,
                             MatField hess);

// F_t = h(x(t) - x(t_n-)) 1_{t >= t_n} g(x(t_1-), ..., x(t_n-)).
// `marks` must be strictly increasing; h(0) = 0. g takes the concatenated
// mark values (n * dim doubles). x(t_k-) reads the declared left limit when
// t_k is a flagged grid time, the held value otherwise.
Functional cylindrical_functional(std::string id, std::vector<double> marks,
                                  std::function<double(std::span<const double>)> g,
                                  std::function<double(std::span<const double>)> h,
                                  std::function<Vec(std::span<const double>)> h_grad,
                                  std::function<Mat(std::span<const double>)> h_hess);

// F_t = sum_i g(x(t_i)) v(t_i) dt_i over [0, t] (left rectangles), d = 1.
Functional qv_integral_functional(std::string id, std::function<double(double)> g);

// F_t = x(t)^2 - int_0^t v du, d = 1. Jet (-v(t), 2 x(t), 2).
Functional quadratic_martingale_functional();

// F_t = exp(x(t) - 1/2 int_0^t v du), d = 1. Jet (-1/2 v(t) F, F, F).
Functional doleans_functional();

// ---------------------------------------------------------------------------
// Obstruction examples. Each evaluates per its formula; jets absent or
// partial, regularity declared accordingly.

Functional delayed_functional(double eps);            // F_t = x(t - eps), no horizontal derivative
Functional current_jump_functional();                 // F_t = x(t) - x(t-)
Functional fixed_time_jump_functional(double t0);     // F_t = 1_{t>=t0} (x(t0) - x(t0-))
Functional running_max_functional();                  // F_t = sup_{s<=t} x(s)

struct ObstructionCatalog {
  Functional delayed;
  Functional current_jump;
  Functional fixed_time_jump;
  Functional running_max;
};
ObstructionCatalog obstruction_functionals(double eps, double t0);

// Closed-form one-sided vertical derivatives of the running maximum under
// +/- eps endpoint bumps; nondiff mirrors the finite-difference flag rule.
struct OneSidedVertical {
  double right = 0.0;
  double left = 0.0;
  bool nondiff = false;
};
OneSidedVertical running_max_one_sided(const LiftedPath& p, double eps, double nondiff_tol);

// Resolves a catalog id: smooth:x | smooth:x2 | smooth:t | smooth:tx |
// qv_integral:1 | qv_integral:x | quadratic_martingale | doleans |
// cylindrical:t1,t2,... | running_max | delayed:<eps> | current_jump |
// fixed_time_jump:<t0>. Throws ConfigError on unknown ids.
Functional catalog_lookup(const std::string& id);

// Ids of every catalog functional carrying an analytic jet (used by
// jet-check experiments).
std::vector<std::string> catalog_jet_ids();

}  // namespace funcito
