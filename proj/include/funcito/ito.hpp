#pragma once

#include <string>
#include <vector>

#include "funcito/finite_diff.hpp"
#include "funcito/functional.hpp"
#include "funcito/path.hpp"

namespace funcito {

// Discretized quadratic variation in the Ito sums: A(t_i) dt_i
// (instantaneous) or dX_i dX_i^T (realized).
enum class QvMode { Instantaneous, Realized };

enum class JetSource { Analytic, FiniteDifference };

struct ItoDecomposition {
  double lhs = 0.0;              // F_t(X_t, A_t) - F_0(X_0, A_0)
  double drift_term = 0.0;       // sum D_tF dt
  double martingale_term = 0.0;  // sum grad F . dX (left point)
  double trace_term = 0.0;       // 1/2 sum tr(hess F Q)
  double residual = 0.0;         // lhs - (drift + martingale + trace)
  std::size_t nondiff_flags = 0;
  QvMode qv_mode = QvMode::Instantaneous;
};

// Reconstructs F along p from the jet, summing left-point Ito sums over the
// grid cells. Jets are evaluated on the prefix of p at each t_i; finite-
// difference jets use the next cell width as the horizontal step.
ItoDecomposition ito_reconstruct(const Functional& F, const LiftedPath& p, JetSource jets,
                                 const FDConfig& cfg, QvMode mode);

// Diagnostic for the finite-variation corollary: a regular functional of a
// martingale has finite variation iff its vertical derivative vanishes.
// Compares sup ||grad F|| with the realized quadratic variation of
// t -> F_t(X_t, A_t) across paths.
struct FiniteVariationReport {
  double grad_sup = 0.0;
  double qv_mean = 0.0;
  double qv_stderr = 0.0;
  double predicted_qv_mean = 0.0;  // mean sum grad^T A grad dt
  double fv_qv_bound_mean = 0.0;   // mean max|dF| sum|dF| (finite-variation ceiling)
  bool inconsistent = false;
  std::string note;
};
FiniteVariationReport finite_variation_diagnostic(const Functional& F,
                                                  const std::vector<LiftedPath>& paths,
                                                  JetSource jets, const FDConfig& cfg);

}  // namespace funcito
