// Test-only oracles, independent of the library implementation paths they
// check: brute-force enumerations, dense references and a proximal-gradient
// lasso solver.
#pragma once

#include <random>

#include "mska/lasso.hpp"
#include "mska/types.hpp"

namespace oracles {

using mska::Index;
using mska::Matrix;
using mska::Scalar;
using mska::Vector;

inline Matrix random_points(Index n, Index d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
  Matrix pts(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) pts(i, k) = unit(rng);
  return pts;
}

inline Matrix random_gaussian(Index rows, Index cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Vector random_vector(Index n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// Compensated (Kahan) accumulation of sum of squares.
inline Scalar kahan_sum_squares(const Vector& v) {
  Scalar sum = 0, comp = 0;
  for (Index i = 0; i < v.size(); ++i) {
    const Scalar y = v[i] * v[i] - comp;
    const Scalar t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// Proximal gradient (ISTA) for min 0.5||h-Ka||^2 + sum w|a| run until the
/// natural-residual fixed point is reached.
inline Vector ista_solve(const Matrix& k, const Vector& h, const Vector& w, Scalar residual_tol,
                         Index maxit = 2000000) {
  const Scalar lip = (k.transpose() * k).operatorNorm();
  const Scalar step = 1.0 / lip;
  Vector alpha = Vector::Zero(k.cols());
  auto shrink = [&](const Vector& v, Scalar s) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
      const Scalar mag = std::abs(v[i]) - s * w[i];
      out[i] = mag > 0 ? (v[i] > 0 ? mag : -mag) : Scalar(0);
    }
    return out;
  };
  for (Index it = 0; it < maxit; ++it) {
    const Vector grad = k.transpose() * (k * alpha - h);
    const Vector next = shrink(alpha - step * grad, step);
    const Scalar residual = (alpha - next).norm();
    alpha = next;
    if (residual <= residual_tol) break;
  }
  return alpha;
}

/// KKT audit for the weighted lasso at tolerance tol.
inline bool kkt_holds(const Matrix& k, const Vector& h, const Vector& w, const Vector& alpha,
                      Scalar tol) {
  const Vector grad = k.transpose() * (k * alpha - h);
  for (Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) {
      if (std::abs(grad[i]) > w[i] + tol) return false;
    } else {
      if (std::abs(grad[i] + (alpha[i] > 0 ? w[i] : -w[i])) > tol) return false;
    }
  }
  return true;
}

}  // namespace oracles
