#include "funcito/ito.hpp"

#include <cmath>

#include "funcito/errors.hpp"

namespace funcito {

ItoDecomposition ito_reconstruct(const Functional& F, const LiftedPath& p, JetSource jets,
                                 const FDConfig& cfg, QvMode mode) {
  if (jets == JetSource::Analytic && !F.has_jet())
    throw ContractError("analytic jet requested but absent: " + F.id);
  const int d = p.dim();

  ItoDecomposition out;
  out.qv_mode = mode;

  PrefixWalker walker(p);
  const double f0 = F.evaluate(walker.path());

  KahanSum drift, mart, trace;
  Vec dx(d);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double dt = p.time(i + 1) - p.time(i);

    DerivativeJet jet;
    if (jets == JetSource::Analytic) {
      jet = F.analytic_jet(walker.path());
    } else {
      FDConfig step_cfg = cfg;
      step_cfg.h_horizontal = dt;
      FDJet fd = fd_jet(F, walker, step_cfg);
      jet = std::move(fd.jet);
      if (fd.any_nondiff) ++out.nondiff_flags;
    }

    auto xi = p.x().value(i);
    auto xj = p.x().value(i + 1);
    for (int k = 0; k < d; ++k) dx[k] = xj[k] - xi[k];

    drift.add(jet.horizontal * dt);
    mart.add(dot(jet.gradient, dx));

    double q = 0.0;
    if (mode == QvMode::Instantaneous) {
      auto vi = p.v().value(i);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) q += jet.hessian[r * d + c] * vi[r * d + c] * dt;
    } else {
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) q += jet.hessian[r * d + c] * dx[r] * dx[c];
    }
    trace.add(0.5 * q);

    walker.advance();
  }

  out.lhs = F.evaluate(p) - f0;
  out.drift_term = drift.value();
  out.martingale_term = mart.value();
  out.trace_term = trace.value();
  out.residual = out.lhs - (out.drift_term + out.martingale_term + out.trace_term);
  return out;
}

FiniteVariationReport finite_variation_diagnostic(const Functional& F,
                                                  const std::vector<LiftedPath>& paths,
                                                  JetSource jets, const FDConfig& cfg) {
  if (jets == JetSource::Analytic && !F.has_jet())
    throw ContractError("analytic jet requested but absent: " + F.id);

  FiniteVariationReport rep;
  KahanSum qv_sum, qv_sq_sum, pred_sum, bound_sum;
  const std::size_t m = paths.size();

  for (const LiftedPath& p : paths) {
    const int d = p.dim();
    PrefixWalker walker(p);
    double prev_f = F.evaluate(walker.path());
    KahanSum qv, pred, abs_df;
    double max_df = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      Vec grad;
      if (jets == JetSource::Analytic)
        grad = F.analytic_jet(walker.path()).gradient;
      else
        grad = vertical_derivative_fd(F, walker, cfg).gradient;
      rep.grad_sup = std::max(rep.grad_sup, sup_norm(grad));
      const double dt = p.time(i + 1) - p.time(i);
      pred.add(quad_form(grad, p.v().value(i), grad) * dt);

      walker.advance();
      const double f = F.evaluate(walker.path());
      const double df = f - prev_f;
      prev_f = f;
      qv.add(df * df);
      abs_df.add(std::abs(df));
      max_df = std::max(max_df, std::abs(df));
      (void)d;
    }
    qv_sum.add(qv.value());
    qv_sq_sum.add(qv.value() * qv.value());
    pred_sum.add(pred.value());
    bound_sum.add(max_df * abs_df.value());
  }

  const double dm = static_cast<double>(m);
  rep.qv_mean = qv_sum.value() / dm;
  rep.predicted_qv_mean = pred_sum.value() / dm;
  rep.fv_qv_bound_mean = bound_sum.value() / dm;
  if (m >= 2) {
    const double var = std::max(0.0, qv_sq_sum.value() / dm - rep.qv_mean * rep.qv_mean);
    rep.qv_stderr = std::sqrt(var / (dm - 1.0));
  }

  // A vanishing gradient allows only the finite-variation ceiling of
  // realized QV; a resolvably large prediction must be matched by it.
  const bool zero_grad_but_qv =
      rep.grad_sup <= 1e-8 && rep.qv_mean > 10.0 * rep.fv_qv_bound_mean + 1e-12;
  const bool qv_missing = rep.predicted_qv_mean > 10.0 * rep.fv_qv_bound_mean &&
                          rep.qv_mean < 0.1 * rep.predicted_qv_mean;
  rep.inconsistent = zero_grad_but_qv || qv_missing;
  if (zero_grad_but_qv)
    rep.note = "gradient vanishes but F shows quadratic variation";
  else if (qv_missing)
    rep.note = "gradient predicts quadratic variation that F does not show";
  return rep;
}

}  // namespace funcito
