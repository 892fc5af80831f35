#include "mska/kernel.hpp"

#include <cmath>
#include <random>

namespace mska {

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "exponential") return KernelFamily::Exponential;
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "matern32") return KernelFamily::Matern32;
  throw UsageError("unknown kernel family '" + name +
                   "' (expected exponential, gaussian or matern32)");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Matern32: return "matern32";
  }
  return "?";
}

Scalar KernelModel::operator()(Scalar dist) const {
  const Scalar r = dist / lengthscale;
  switch (family) {
    case KernelFamily::Exponential:
      return std::exp(-r);
    case KernelFamily::Gaussian:
      return std::exp(-0.5 * r * r);
    case KernelFamily::Matern32: {
      const Scalar s = std::sqrt(3.0) * r;
      return (1.0 + s) * std::exp(-s);
    }
  }
  return 0.0;
}

Scalar eval_kernel(const KernelModel& model, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size()) throw DataError("eval_kernel: dimension mismatch");
  if (!x.allFinite() || !y.allFinite()) throw DataError("eval_kernel: non-finite input");
  if (model.lengthscale <= 0) throw UsageError("kernel lengthscale must be positive");
  return model((x - y).norm());
}

std::vector<Scalar> LengthscaleSchedule::values() const {
  if (a <= 0 || b <= 0) throw UsageError("lengthscale schedule bounds must be positive");
  if (count < 1) throw UsageError("lengthscale schedule needs at least one level");
  std::vector<Scalar> out(count);
  if (count == 1) {
    out[0] = a;
    return out;
  }
  for (Index j = 0; j < count; ++j)
    out[j] = a * std::pow(b / a, Scalar(j) / Scalar(count - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

Matrix assemble_dense_block(const Matrix& rows, const KernelModel& model, const Matrix& centers) {
  if (rows.cols() != centers.cols()) throw DataError("kernel assembly: dimension mismatch");
  if (model.lengthscale <= 0) throw UsageError("kernel lengthscale must be positive");
  const Index n = rows.rows(), m = centers.rows();
  Matrix out(n, m);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const auto xi = rows.row(i);
    for (Index j = 0; j < m; ++j) out(i, j) = model((xi - centers.row(j)).norm());
  }
  return out;
}

Matrix assemble_dense(const PointSet& rows, const KernelDictionary& dict) {
  rows.validate();
  const Index n = rows.size();
  const Index m = dict.total_columns();
  if (n * m > Index(100'000'000)) throw DataError("dense kernel assembly exceeds the size guard");

  for (const auto& e : dict.entries) {
    if (!e.centers.allFinite()) throw DataError("kernel centers contain non-finite coordinates");
    // Positive definiteness requires mutually distinct centers within a block.
    for (Index i = 0; i < e.centers.rows(); ++i)
      for (Index j = i + 1; j < e.centers.rows(); ++j)
        if ((e.centers.row(i) - e.centers.row(j)).norm() == Scalar(0))
          throw DataError("duplicate centers within one dictionary entry");
  }

  Matrix out(n, m);
  Index off = 0;
  for (const auto& e : dict.entries) {
    out.middleCols(off, e.centers.rows()) = assemble_dense_block(rows.coords, e.model, e.centers);
    off += e.centers.rows();
  }
  return out;
}

LipschitzEstimate estimate_lipschitz(const LinOp& op, Scalar rel_tol, Index maxit) {
  LipschitzEstimate est;
  const Index m = op.cols();
  if (m == 0 || op.rows() == 0) {
    est.zero_operator = true;
    return est;
  }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  Vector v(m);
  for (Index i = 0; i < m; ++i) v[i] = normal(rng);
  v.normalize();

  Scalar prev = 0;
  for (Index it = 0; it < maxit; ++it) {
    const Vector u = op.apply_t(op.apply(v));
    const Scalar rayleigh = v.dot(u);
    est.history.push_back(rayleigh);
    est.iterations = it + 1;
    const Scalar nu = u.norm();
    if (nu == Scalar(0)) {
      est.value = 0;
      est.zero_operator = true;
      return est;
    }
    v = u / nu;
    est.value = rayleigh;
    if (it > 0 && std::abs(rayleigh - prev) <= rel_tol * std::abs(rayleigh)) break;
    prev = rayleigh;
  }
  if (est.value <= 0) est.zero_operator = est.value == 0;
  return est;
}

}  // namespace mska
