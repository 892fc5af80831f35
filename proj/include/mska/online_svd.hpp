#pragma once

#include <vector>

#include "mska/types.hpp"

namespace mska {

/// Incrementally updated thin SVD U S V^t of a growing column block, with a
/// ledger mapping tracked columns to their global indices. Columns are never
/// evicted. U is re-orthogonalized when its drift exceeds 1e-8.
class OnlineSVD {
 public:
  Index rank() const { return s_.size(); }
  Index rows() const { return u_.rows(); }
  Index tracked() const { return static_cast<Index>(ledger_.size()); }
  bool empty() const { return ledger_.empty(); }

  const Matrix& u() const { return u_; }
  const Vector& singular_values() const { return s_; }
  const Matrix& v() const { return v_; }
  const std::vector<Index>& ledger() const { return ledger_; }

  bool tracks(Index global_index) const;
  /// Position of a global column index within the ledger (-1 if untracked).
  Index ledger_position(Index global_index) const;

  /// Appends a block of new columns (Brand-style update: project onto the
  /// current image basis, QR the residual, re-diagonalize the small core).
  void append_columns(const Matrix& block, const std::vector<Index>& global_indices);

  /// U S V^t, reproducing the tracked block.
  Matrix reconstruct() const;

  Scalar orthogonality_error() const;  // ||U^t U - I||_F

 private:
  void reorthogonalize();

  Matrix u_;  // N x l
  Vector s_;  // l, nonincreasing
  Matrix v_;  // s x l
  std::vector<Index> ledger_;
  std::vector<Index> position_;  // sparse map: global index -> ledger slot
};

}  // namespace mska
