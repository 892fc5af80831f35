#include "mska/lasso.hpp"

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace mska {

namespace {
constexpr Scalar kPinvCutoff = 1e-12;
}

void LassoProblem::validate() const {
  if (h.size() != op.rows()) throw UsageError("lasso: data vector length mismatch");
  if (w.size() != op.cols()) throw UsageError("lasso: weight vector length mismatch");
  if ((w.array() < 0).any()) throw UsageError("lasso: weights must be nonnegative");
  if (lambda <= 0) throw UsageError("lasso: lambda must be positive (is the operator zero?)");
}

Vector soft_shrinkage(const Vector& v, const Vector& thresholds) {
  if (v.size() != thresholds.size()) throw UsageError("soft_shrinkage: length mismatch");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const Scalar mag = std::abs(v[i]) - thresholds[i];
    out[i] = mag > 0 ? (v[i] > 0 ? mag : -mag) : Scalar(0);
  }
  return out;
}

NormalMapEval eval_normal_map(const LassoProblem& p, const Vector& z) {
  NormalMapEval ev;
  ev.alpha = soft_shrinkage(z, p.lambda * p.w);
  ev.grad = p.op.apply_t(p.op.apply(ev.alpha) - p.h);
  ev.fnor = ev.grad + (z - ev.alpha) / p.lambda;
  return ev;
}

Scalar objective(const LassoProblem& p, const Vector& alpha) {
  return 0.5 * (p.h - p.op.apply(alpha)).squaredNorm() + p.w.dot(alpha.cwiseAbs());
}

namespace {

// SVD of the active rows of V S; the factors serve consecutive iterations as
// long as the active set and the ledger stay put.
struct ReducedFactors {
  Matrix u;         // |A| x r
  Vector sigma;     // r
  Scalar condition = 1.0;

  Vector solve(const Vector& rhs) const {
    if (sigma.size() == 0) return Vector::Zero(rhs.size());
    const Scalar smax = sigma[0];
    Vector scaled = u.transpose() * rhs;
    for (Index i = 0; i < sigma.size(); ++i)
      scaled[i] = (sigma[i] > kPinvCutoff * smax && sigma[i] > 0)
                      ? scaled[i] / (sigma[i] * sigma[i])
                      : Scalar(0);
    return u * scaled;
  }
};

ReducedFactors factor_active_block(const OnlineSVD& svd, const std::vector<Index>& active) {
  ReducedFactors f;
  if (active.empty()) return f;
  Matrix w(static_cast<Index>(active.size()), svd.rank());
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Index pos = svd.ledger_position(active[i]);
    if (pos < 0) throw UsageError("solve_reduced_newton: active column not tracked");
    w.row(static_cast<Index>(i)) = svd.v().row(pos);
  }
  w = w * svd.singular_values().asDiagonal();
  Eigen::BDCSVD<Matrix> wsvd(w, Eigen::ComputeThinU);
  f.u = wsvd.matrixU();
  f.sigma = wsvd.singularValues();
  const Scalar smax = f.sigma.size() > 0 ? f.sigma[0] : Scalar(0);
  const Scalar smin = f.sigma.size() > 0 ? f.sigma[f.sigma.size() - 1] : Scalar(0);
  f.condition = smin > 0 ? smax / smin : std::numeric_limits<Scalar>::infinity();
  return f;
}

}  // namespace

ReducedSolve solve_reduced_newton(const OnlineSVD& svd, const std::vector<Index>& active,
                                  const Vector& rhs_active) {
  const ReducedFactors f = factor_active_block(svd, active);
  ReducedSolve out;
  out.condition = f.condition;
  out.q_active = active.empty() ? Vector() : f.solve(rhs_active);
  return out;
}

Vector lift_and_clip_step(const LassoProblem& p, const NormalMapEval& eval,
                          const std::vector<Index>& active, const Vector& q_active,
                          Scalar delta) {
  Vector q_full = Vector::Zero(p.cols());
  for (std::size_t i = 0; i < active.size(); ++i) q_full[active[i]] = q_active[i];
  const Vector ktk_q = p.op.apply_t(p.op.apply(q_full));

  Vector sbar = -p.lambda * (eval.fnor + ktk_q);
  for (std::size_t i = 0; i < active.size(); ++i) sbar[active[i]] = q_active[i];

  const Scalar norm = sbar.norm();
  if (norm > delta) sbar *= delta / norm;
  return sbar;
}

namespace {

Scalar merit(const LassoProblem& p, const NormalMapEval& ev, Scalar tau) {
  return objective(p, ev.alpha) + 0.5 * tau * p.lambda * ev.fnor.squaredNorm();
}

double tick() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::pair<Vector, SolveReport> tr_ssn(const LassoProblem& p, const Vector& z0,
                                      const TrssnConfig& cfg) {
  p.validate();
  if (z0.size() != p.cols()) throw UsageError("tr_ssn: initial iterate length mismatch");
  const Scalar lam_lip_sq = p.lipschitz * p.lipschitz * p.lambda * p.lambda;
  const Scalar tau = 2.0 * cfg.c_tau / (lam_lip_sq + 2.0);
  const Scalar nu_bar =
      0.5 * std::min(tau, cfg.c_nu * (1.0 - 0.5 * tau * (0.5 * lam_lip_sq + 1.0)));

  Vector z = z0;
  Scalar delta = cfg.delta0;
  Index n_success = 0;
  OnlineSVD svd;
  SolveReport report;

  NormalMapEval ev = eval_normal_map(p, z);

  // The factorization of the active block survives iterations that neither
  // change the active set nor append columns; a rejected step additionally
  // reuses the unclipped direction (only the trust-region radius moved).
  ReducedFactors factors;
  std::vector<Index> factored_active;
  bool factors_valid = false;
  bool have_step = false;
  Vector cached_sbar;
  std::vector<Index> active;

  for (Index k = 0; k < cfg.maxit; ++k) {
    const Scalar fn = ev.fnor.norm();
    if (!std::isfinite(fn)) throw SolverError("tr_ssn: normal-map residual diverged");
    if (fn <= cfg.tol) {
      report.converged = true;
      break;
    }

    if (!have_step) {
      active.clear();
      for (Index i = 0; i < p.cols(); ++i)
        if (std::abs(z[i]) > p.lambda * p.w[i]) active.push_back(i);

      std::vector<Index> missing;
      for (Index i : active)
        if (!svd.tracks(i)) missing.push_back(i);
      if (!missing.empty()) {
        const double t0 = tick();
        svd.append_columns(p.op.gather_columns(missing), missing);
        report.seconds_append += tick() - t0;
        ++report.append_count;
        report.appended_columns += static_cast<Index>(missing.size());
        factors_valid = false;
      }
      if (!factors_valid || factored_active != active) {
        const double t0 = tick();
        factors = factor_active_block(svd, active);
        report.seconds_factor += tick() - t0;
        ++report.refactor_count;
        factored_active = active;
        factors_valid = true;
      }

      Vector rhs(static_cast<Index>(active.size()));
      for (std::size_t i = 0; i < active.size(); ++i)
        rhs[static_cast<Index>(i)] = -ev.fnor[active[i]];
      const Vector q_active = active.empty() ? Vector() : factors.solve(rhs);
      cached_sbar = lift_and_clip_step(p, ev, active, q_active,
                                       std::numeric_limits<Scalar>::infinity());
      have_step = true;
    }

    Vector s = cached_sbar;
    const Scalar snorm = s.norm();
    if (snorm > delta) s *= delta / snorm;

    const Vector z_trial = z + s;
    const double t_eval = tick();
    const NormalMapEval ev_trial = eval_normal_map(p, z_trial);
    report.seconds_eval += tick() - t_eval;
    const Scalar h_cur = merit(p, ev, tau);
    const Scalar h_trial = merit(p, ev_trial, tau);
    if (!std::isfinite(h_trial) || !std::isfinite(h_cur)) {
      std::ostringstream oss;
      oss << "tr_ssn: non-finite merit at iteration " << k << " (|F_nor| = " << fn
          << ", delta = " << delta << ", |A| = " << active.size() << ")";
      throw SolverError(oss.str());
    }
    const Scalar ared = h_cur - h_trial;

    const Scalar ss_diff = (ev_trial.alpha - ev.alpha).norm();
    const Scalar ns_clamped = std::max<Scalar>(static_cast<Scalar>(n_success), 2.0);
    const Scalar log_ns = std::log(ns_clamped);
    const Scalar nu_k =
        std::min(nu_bar, std::pow(ns_clamped * log_ns * log_ns * ss_diff, 2.0 * cfg.p_tilde));

    const Scalar clip = std::min(delta, p.lambda * fn);
    Scalar pred = 0.5 * tau * fn * std::min(p.lambda, clip);
    if (clip > 0) pred += nu_k * fn / clip * ss_diff * ss_diff;

    Scalar rho;
    bool accepted;
    if (!(pred > 0) || !std::isfinite(pred)) {
      rho = -std::numeric_limits<Scalar>::infinity();  // guard the division
      accepted = false;
    } else {
      rho = ared / pred;
      accepted = rho >= cfg.eta1;
    }

    report.history.push_back({k, fn, static_cast<Index>(active.size()), factors.condition, rho,
                              accepted, delta});

    if (accepted) {
      z = z_trial;
      ev = ev_trial;
      ++n_success;
      have_step = false;
      if (rho >= cfg.eta2) delta = std::min(cfg.delta_max, 2.0 * delta);
    } else {
      delta = std::max(cfg.delta_min, 0.5 * delta);
    }
    report.iterations = k + 1;
  }

  report.final_fnor = ev.fnor.norm();
  report.converged = report.final_fnor <= cfg.tol;
  report.ledger_size = svd.tracked();
  report.successful_steps = n_success;
  return {ev.alpha, report};
}

ContinuationResult continuation_solve(const LassoProblem& base, const ContinuationConfig& cc) {
  if (cc.r_min >= cc.r0) throw UsageError("continuation: r_min must be below r0");
  if (cc.gamma <= 0 || cc.gamma >= 1) throw UsageError("continuation: gamma must be in (0,1)");

  ContinuationResult result;
  result.alpha = Vector::Zero(base.cols());
  for (Index j = 0;; ++j) {
    const Scalar r = cc.r0 * std::pow(cc.gamma, Scalar(j));
    if (r < cc.r_min) break;
    LassoProblem level = base;
    level.w = r * base.w;
    const Vector z0 =
        result.alpha - base.lambda * base.op.apply_t(base.op.apply(result.alpha) - base.h);
    auto [alpha, report] = tr_ssn(level, z0, cc.inner);
    result.alpha = std::move(alpha);
    result.r_values.push_back(r);
    result.levels.push_back(std::move(report));
  }
  return result;
}

}  // namespace mska
