#pragma once

#include <optional>
#include <vector>

#include "funcito/functional.hpp"
#include "funcito/path.hpp"

namespace funcito {

// Finite-difference settings for pathwise derivatives. The vertical bump is
// eps_vertical * (1 + ||x(t)||_inf) when scale_eps_by_state is set; the
// horizontal step defaults to one grid step (the trailing mesh) and never
// crosses the functional's max_time (it shrinks to half the remaining gap).
struct FDConfig {
  enum class Scheme { Forward, Central };

  double eps_vertical = 1e-4;
  bool scale_eps_by_state = true;
  std::optional<double> h_horizontal;  // nullopt: one grid step
  Scheme scheme = Scheme::Central;
  double nondiff_tol = 1e-3;

  double effective_eps(const LiftedPath& p) const;
  double effective_h(const LiftedPath& p, double max_time) const;
};

// One-sided rate of change under horizontal extension (the definition is
// one-sided, so this is always a forward difference).
double horizontal_derivative_fd(const Functional& F, const LiftedPath& p, const FDConfig& cfg);
double horizontal_derivative_fd(const Functional& F, PrefixWalker& walker, const FDConfig& cfg);

// Two-mesh probe: estimates at h and h/2 and whether they agree within
// agree_tol * (1 + scale). Horizontally non-differentiable functionals
// (delayed evaluation) fail this check on generic paths.
struct HorizontalAgreement {
  double coarse = 0.0;
  double fine = 0.0;
  bool agree = true;
};
HorizontalAgreement horizontal_two_mesh_check(const Functional& F, const LiftedPath& p,
                                              const FDConfig& cfg, double agree_tol = 1e-2);

// Endpoint-bump gradient with one-sided diagnostics. A coordinate is flagged
// non-differentiable when the forward and backward estimates differ by more
// than nondiff_tol * (1 + |central|).
struct VerticalFD {
  Vec gradient;              // per cfg.scheme
  Vec right;                 // forward one-sided estimates
  Vec left;                  // backward one-sided estimates
  std::vector<bool> nondiff;
  bool any_nondiff = false;
};
VerticalFD vertical_derivative_fd(const Functional& F, const LiftedPath& p, const FDConfig& cfg);
VerticalFD vertical_derivative_fd(const Functional& F, PrefixWalker& walker, const FDConfig& cfg);

// Second vertical derivative: 3-point stencil on the diagonal, 4-point cross
// stencil off-diagonal, symmetrized.
Mat second_vertical_fd(const Functional& F, const LiftedPath& p, const FDConfig& cfg);
Mat second_vertical_fd(const Functional& F, PrefixWalker& walker, const FDConfig& cfg);

struct FDJet {
  DerivativeJet jet;
  bool any_nondiff = false;
};
FDJet fd_jet(const Functional& F, const LiftedPath& p, const FDConfig& cfg);
FDJet fd_jet(const Functional& F, PrefixWalker& walker, const FDConfig& cfg);

// Max relative errors of the analytic jet against finite differences over a
// path set; errors are |fd - exact| / (1 + |exact|) per component.
struct JetTolerances {
  double gradient = 1e-6;
  double hessian = 1e-4;
  double horizontal = 1e-2;
};
struct JetCheckReport {
  double max_err_horizontal = 0.0;
  double max_err_gradient = 0.0;
  double max_err_hessian = 0.0;
  std::size_t paths = 0;
  bool pass = false;
};
JetCheckReport jet_consistency_check(const Functional& F, const std::vector<LiftedPath>& paths,
                                     const FDConfig& cfg, const JetTolerances& tol = {});

}  // namespace funcito
