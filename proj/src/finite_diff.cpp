#include "funcito/finite_diff.hpp"

#include <cmath>

#include "funcito/errors.hpp"

namespace funcito {

double FDConfig::effective_eps(const LiftedPath& p) const {
  if (!scale_eps_by_state) return eps_vertical;
  return eps_vertical * (1.0 + sup_norm(p.x().value(p.size() - 1)));
}

double FDConfig::effective_h(const LiftedPath& p, double max_time) const {
  double h;
  if (h_horizontal) {
    h = *h_horizontal;
  } else if (p.size() >= 2) {
    h = p.time(p.size() - 1) - p.time(p.size() - 2);
  } else {
    h = eps_vertical;  // degenerate single-point grid
  }
  if (!(h > 0.0)) throw DomainError("horizontal step must be positive");
  const double t = p.horizon();
  if (t + h > max_time) {
    if (t >= max_time) throw DomainError("cannot extend horizontally at max_time");
    h = 0.5 * (max_time - t);
  }
  return h;
}

namespace {

// Generic kernels over an endpoint-bump evaluator: eval(e) = F(p with
// endpoint shifted by e). Keeps the copy-based and walker-based variants in
// lockstep.

template <typename BumpEval>
VerticalFD vertical_fd_kernel(int d, double f0, double eps, const FDConfig& cfg, BumpEval&& eval) {
  VerticalFD out;
  out.gradient.assign(d, 0.0);
  out.right.assign(d, 0.0);
  out.left.assign(d, 0.0);
  out.nondiff.assign(d, false);
  Vec e(d, 0.0);
  for (int i = 0; i < d; ++i) {
    e[i] = eps;
    const double fp = eval(e);
    e[i] = -eps;
    const double fm = eval(e);
    e[i] = 0.0;
    out.right[i] = (fp - f0) / eps;
    out.left[i] = (f0 - fm) / eps;
    const double central = (fp - fm) / (2.0 * eps);
    out.gradient[i] = cfg.scheme == FDConfig::Scheme::Forward ? out.right[i] : central;
    out.nondiff[i] =
        std::abs(out.right[i] - out.left[i]) > cfg.nondiff_tol * (1.0 + std::abs(central));
    out.any_nondiff = out.any_nondiff || out.nondiff[i];
  }
  return out;
}

template <typename BumpEval>
Mat second_vertical_kernel(int d, double f0, double eps, BumpEval&& eval) {
  Mat h(static_cast<std::size_t>(d) * d, 0.0);
  Vec e(d, 0.0);
  for (int i = 0; i < d; ++i) {
    e[i] = eps;
    const double fp = eval(e);
    e[i] = -eps;
    const double fm = eval(e);
    e[i] = 0.0;
    h[i * d + i] = (fp - 2.0 * f0 + fm) / (eps * eps);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      e[i] = eps;
      e[j] = eps;
      const double fpp = eval(e);
      e[j] = -eps;
      const double fpm = eval(e);
      e[i] = -eps;
      e[j] = eps;
      const double fmp = eval(e);
      e[j] = -eps;
      const double fmm = eval(e);
      e[i] = 0.0;
      e[j] = 0.0;
      const double cross = (fpp - fpm - fmp + fmm) / (4.0 * eps * eps);
      h[i * d + j] = cross;
      h[j * d + i] = cross;
    }
  }
  return h;
}

}  // namespace

double horizontal_derivative_fd(const Functional& F, const LiftedPath& p, const FDConfig& cfg) {
  const double h = cfg.effective_h(p, F.max_time);
  const double f0 = F.evaluate(p);
  const double fh = F.evaluate(horizontal_extend(p, h));
  return (fh - f0) / h;
}

double horizontal_derivative_fd(const Functional& F, PrefixWalker& walker, const FDConfig& cfg) {
  const double h = cfg.effective_h(walker.path(), F.max_time);
  const double f0 = F.evaluate(walker.path());
  const double fh = walker.with_extension(h, F.evaluate);
  return (fh - f0) / h;
}

HorizontalAgreement horizontal_two_mesh_check(const Functional& F, const LiftedPath& p,
                                              const FDConfig& cfg, double agree_tol) {
  HorizontalAgreement r;
  FDConfig coarse = cfg;
  const double h = cfg.effective_h(p, F.max_time);
  coarse.h_horizontal = h;
  FDConfig fine = cfg;
  fine.h_horizontal = 0.5 * h;
  r.coarse = horizontal_derivative_fd(F, p, coarse);
  r.fine = horizontal_derivative_fd(F, p, fine);
  const double scale = 1.0 + std::max(std::abs(r.coarse), std::abs(r.fine));
  r.agree = std::abs(r.coarse - r.fine) <= agree_tol * scale;
  return r;
}

VerticalFD vertical_derivative_fd(const Functional& F, const LiftedPath& p, const FDConfig& cfg) {
  const double f0 = F.evaluate(p);
  const double eps = cfg.effective_eps(p);
  return vertical_fd_kernel(p.dim(), f0, eps, cfg,
                            [&](const Vec& e) { return F.evaluate(vertical_bump(p, e)); });
}

VerticalFD vertical_derivative_fd(const Functional& F, PrefixWalker& walker, const FDConfig& cfg) {
  const double f0 = F.evaluate(walker.path());
  const double eps = cfg.effective_eps(walker.path());
  return vertical_fd_kernel(walker.path().dim(), f0, eps, cfg,
                            [&](const Vec& e) { return walker.with_bump(e, F.evaluate); });
}

Mat second_vertical_fd(const Functional& F, const LiftedPath& p, const FDConfig& cfg) {
  const double f0 = F.evaluate(p);
  const double eps = cfg.effective_eps(p);
  return second_vertical_kernel(p.dim(), f0, eps,
                                [&](const Vec& e) { return F.evaluate(vertical_bump(p, e)); });
}

Mat second_vertical_fd(const Functional& F, PrefixWalker& walker, const FDConfig& cfg) {
  const double f0 = F.evaluate(walker.path());
  const double eps = cfg.effective_eps(walker.path());
  return second_vertical_kernel(walker.path().dim(), f0, eps,
                                [&](const Vec& e) { return walker.with_bump(e, F.evaluate); });
}

FDJet fd_jet(const Functional& F, const LiftedPath& p, const FDConfig& cfg) {
  FDJet out;
  out.jet.horizontal = horizontal_derivative_fd(F, p, cfg);
  VerticalFD v = vertical_derivative_fd(F, p, cfg);
  out.jet.gradient = std::move(v.gradient);
  out.jet.hessian = second_vertical_fd(F, p, cfg);
  out.any_nondiff = v.any_nondiff;
  return out;
}

FDJet fd_jet(const Functional& F, PrefixWalker& walker, const FDConfig& cfg) {
  FDJet out;
  out.jet.horizontal = horizontal_derivative_fd(F, walker, cfg);
  VerticalFD v = vertical_derivative_fd(F, walker, cfg);
  out.jet.gradient = std::move(v.gradient);
  out.jet.hessian = second_vertical_fd(F, walker, cfg);
  out.any_nondiff = v.any_nondiff;
  return out;
}

JetCheckReport jet_consistency_check(const Functional& F, const std::vector<LiftedPath>& paths,
                                     const FDConfig& cfg, const JetTolerances& tol) {
  if (!F.has_jet()) throw ContractError("jet consistency check needs an analytic jet");
  JetCheckReport rep;
  auto rel = [](double fd, double exact) {
    return std::abs(fd - exact) / (1.0 + std::abs(exact));
  };
  for (const LiftedPath& p : paths) {
    const DerivativeJet exact = F.analytic_jet(p);
    const FDJet fd = fd_jet(F, p, cfg);
    rep.max_err_horizontal =
        std::max(rep.max_err_horizontal, rel(fd.jet.horizontal, exact.horizontal));
    for (std::size_t k = 0; k < exact.gradient.size(); ++k)
      rep.max_err_gradient = std::max(rep.max_err_gradient, rel(fd.jet.gradient[k], exact.gradient[k]));
    for (std::size_t k = 0; k < exact.hessian.size(); ++k)
      rep.max_err_hessian = std::max(rep.max_err_hessian, rel(fd.jet.hessian[k], exact.hessian[k]));
    ++rep.paths;
  }
  rep.pass = rep.max_err_gradient <= tol.gradient && rep.max_err_hessian <= tol.hessian &&
             rep.max_err_horizontal <= tol.horizontal;
  return rep;
}

}  // namespace funcito
