#pragma once

#include "mska/types.hpp"

namespace mska {

/// ||approx - reference||_2 / ||reference||_2 over an evaluation set.
inline Scalar relative_l2_error(const Vector& approx, const Vector& reference) {
  if (approx.size() != reference.size()) throw DataError("relative_l2_error: length mismatch");
  if (approx.size() == 0) throw DataError("relative_l2_error: empty evaluation set");
  const Scalar denom = reference.norm();
  if (denom == Scalar(0)) throw DataError("relative_l2_error: reference has zero norm");
  return (approx - reference).norm() / denom;
}

inline Scalar max_abs_error(const Vector& approx, const Vector& reference) {
  if (approx.size() != reference.size()) throw DataError("max_abs_error: length mismatch");
  return (approx - reference).cwiseAbs().maxCoeff();
}

}  // namespace mska
