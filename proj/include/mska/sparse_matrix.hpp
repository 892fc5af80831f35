#pragma once

#include <string>
#include <vector>

#include "mska/types.hpp"

namespace mska {

struct Triplet {
  Index row;
  Index col;
  Scalar value;
};

/// Row-major compressed sparse matrix. Indices are sorted within each row and
/// explicit zeros are never stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_offsets() const { return offsets_; }
  const std::vector<Index>& col_indices() const { return indices_; }
  const std::vector<Scalar>& values() const { return values_; }

  Vector multiply(const Vector& v) const;            // A v, OpenMP over rows
  Vector multiply_serial(const Vector& v) const;     // reference implementation
  Vector multiply_t(const Vector& v) const;          // A^t v, OpenMP
  Vector multiply_t_serial(const Vector& v) const;   // reference implementation

  /// Materializes the requested columns as a dense block, in index order.
  Matrix gather_columns(const std::vector<Index>& cols) const;

  Matrix to_dense() const;
  Scalar frobenius_norm() const;

  /// Horizontal concatenation, preserving column offsets of the blocks.
  static SparseMatrix hcat(const std::vector<SparseMatrix>& blocks);

  void write_triplets(const std::string& path) const;
  static SparseMatrix read_triplets(const std::string& path, Index rows, Index cols);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> offsets_;
  std::vector<Index> indices_;
  std::vector<Scalar> values_;
};

Vector spmv(const SparseMatrix& a, const Vector& v);
Vector spmv_t(const SparseMatrix& a, const Vector& v);
Matrix sp_col_gather(const SparseMatrix& a, const std::vector<Index>& cols);

}  // namespace mska
