#pragma once

#include <vector>

#include "mska/lin_op.hpp"
#include "mska/online_svd.hpp"
#include "mska/types.hpp"

namespace mska {

/// Weighted l1-regularized least-squares problem
///   min 0.5 ||h - K a||^2 + sum_i w_i |a_i|
/// in normal-map form with proximal parameter lambda (default 2/L).
struct LassoProblem {
  LinOp op;
  Vector h;
  Vector w;
  Scalar lambda = 0;
  Scalar lipschitz = 0;  // L ~ sigma_max(K)^2, drives tau/nu defaults

  Index rows() const { return op.rows(); }
  Index cols() const { return op.cols(); }
  void validate() const;
};

Vector soft_shrinkage(const Vector& v, const Vector& thresholds);

struct NormalMapEval {
  Vector fnor;   // K^t(K SS(z) - h) + (z - SS(z)) / lambda
  Vector alpha;  // SS_{lambda w}(z)
  Vector grad;   // K^t(K alpha - h)
};

NormalMapEval eval_normal_map(const LassoProblem& p, const Vector& z);

/// 0.5 ||h - K a||^2 + sum w_i |a_i|
Scalar objective(const LassoProblem& p, const Vector& alpha);

struct TrssnConfig {
  Scalar tol = 1e-6;
  Index maxit = 100;
  Scalar eta1 = 1e-3;
  Scalar eta2 = 1e-1;
  Scalar delta0 = 1.0;
  Scalar delta_min = 1e-5;
  Scalar delta_max = 1e3;
  Scalar c_tau = 0.05;
  Scalar c_nu = 0.05;
  Scalar p_tilde = 0.1;
};

struct IterationRecord {
  Index iteration;
  Scalar fnor_norm;
  Index active_count;
  Scalar condition;  // sigma_max/sigma_min of the reduced block, pre-truncation
  Scalar rho_ratio;
  bool accepted;
  Scalar delta;
};

struct SolveReport {
  std::vector<IterationRecord> history;
  Scalar final_fnor = 0;
  Index iterations = 0;
  bool converged = false;
  Index ledger_size = 0;  // |D| at exit
  Index successful_steps = 0;
  // profile counters
  Index refactor_count = 0;
  Index append_count = 0;
  Index appended_columns = 0;
  double seconds_factor = 0;
  double seconds_append = 0;
  double seconds_eval = 0;
};

/// Least-squares solve of the active-block normal equations through the
/// factored form I_D K^t K I_D = V S^2 V^t: SVD of the active rows of V S,
/// truncated pseudo-inverse with relative cutoff 1e-12. Requires every active
/// column to be tracked already.
struct ReducedSolve {
  Vector q_active;   // packed in active order
  Scalar condition;  // before truncation
};

ReducedSolve solve_reduced_newton(const OnlineSVD& svd, const std::vector<Index>& active,
                                  const Vector& rhs_active);

/// Lifted semismooth Newton step: active components are q, inactive ones are
/// -lambda (F_nor + K^t K I_A q), rescaled into the trust region.
Vector lift_and_clip_step(const LassoProblem& p, const NormalMapEval& eval,
                          const std::vector<Index>& active, const Vector& q_active, Scalar delta);

/// Trust-region semismooth Newton on the normal map, stabilized by the online
/// SVD over the columns that have been active so far.
std::pair<Vector, SolveReport> tr_ssn(const LassoProblem& p, const Vector& z0,
                                      const TrssnConfig& cfg);

struct ContinuationConfig {
  Scalar r0 = 10.0;
  Scalar gamma = 0.7;
  Scalar r_min = 1e-5;
  TrssnConfig inner;
};

struct ContinuationResult {
  Vector alpha;
  std::vector<Scalar> r_values;
  std::vector<SolveReport> levels;
};

/// Outer loop shrinking the l1 weight geometrically (r_j = r0 gamma^j until
/// r_j < r_min), warm-starting each level from the previous solution through
/// z = alpha - lambda grad f(alpha). The SVD ledger is reset per level.
ContinuationResult continuation_solve(const LassoProblem& base, const ContinuationConfig& cc);

}  // namespace mska
