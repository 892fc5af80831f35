#pragma once

#include <variant>

#include "mska/sparse_matrix.hpp"
#include "mska/types.hpp"

namespace mska {

/// Dense-or-sparse linear operator: the solver and the power iteration only
/// need apply, transpose-apply and column gathering.
class LinOp {
 public:
  LinOp() = default;
  explicit LinOp(Matrix dense) : op_(std::move(dense)) {}
  explicit LinOp(SparseMatrix sparse) : op_(std::move(sparse)) {}

  Index rows() const {
    return std::holds_alternative<Matrix>(op_) ? std::get<Matrix>(op_).rows()
                                               : std::get<SparseMatrix>(op_).rows();
  }
  Index cols() const {
    return std::holds_alternative<Matrix>(op_) ? std::get<Matrix>(op_).cols()
                                               : std::get<SparseMatrix>(op_).cols();
  }

  Vector apply(const Vector& v) const {
    if (std::holds_alternative<Matrix>(op_)) return std::get<Matrix>(op_) * v;
    return std::get<SparseMatrix>(op_).multiply(v);
  }

  Vector apply_t(const Vector& v) const {
    if (std::holds_alternative<Matrix>(op_)) return std::get<Matrix>(op_).transpose() * v;
    return std::get<SparseMatrix>(op_).multiply_t(v);
  }

  Matrix gather_columns(const std::vector<Index>& cols) const {
    if (std::holds_alternative<Matrix>(op_)) {
      const Matrix& m = std::get<Matrix>(op_);
      Matrix out(m.rows(), static_cast<Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = m.col(cols[j]);
      return out;
    }
    return std::get<SparseMatrix>(op_).gather_columns(cols);
  }

  bool is_dense() const { return std::holds_alternative<Matrix>(op_); }
  const Matrix& dense() const { return std::get<Matrix>(op_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(op_); }

 private:
  std::variant<Matrix, SparseMatrix> op_;
};

}  // namespace mska
