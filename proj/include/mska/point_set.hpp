#pragma once

#include <cmath>

#include "mska/types.hpp"

namespace mska {

/// Scattered data sites, one point per row.
struct PointSet {
  Matrix coords;  // N x d

  PointSet() = default;
  explicit PointSet(Matrix pts) : coords(std::move(pts)) { validate(); }

  Index size() const { return coords.rows(); }
  Index dim() const { return coords.cols(); }
  Eigen::RowVectorXd point(Index i) const { return coords.row(i); }

  void validate() const {
    if (coords.rows() < 1) throw DataError("point set is empty");
    if (coords.cols() < 1) throw DataError("point set has dimension 0");
    if (!coords.allFinite()) throw DataError("point set contains non-finite coordinates");
  }
};

}  // namespace mska
