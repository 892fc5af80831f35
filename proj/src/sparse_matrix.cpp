#include "mska/sparse_matrix.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mska {

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> t) {
  SparseMatrix a(rows, cols);
  for (const auto& e : t)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw DataError("sparse triplet out of range");
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return x.row < y.row || (x.row == y.row && x.col < y.col);
  });
  a.indices_.reserve(t.size());
  a.values_.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    // Duplicates accumulate.
    if (!a.values_.empty() && !t.empty() && i > 0 && t[i].row == t[i - 1].row &&
        t[i].col == t[i - 1].col) {
      a.values_.back() += t[i].value;
      continue;
    }
    a.offsets_[t[i].row + 1]++;
    a.indices_.push_back(t[i].col);
    a.values_.push_back(t[i].value);
  }
  for (Index r = 0; r < rows; ++r) a.offsets_[r + 1] += a.offsets_[r];
  return a;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

Vector SparseMatrix::multiply_serial(const Vector& v) const {
  if (v.size() != cols_) throw DataError("spmv: shape mismatch");
  Vector out(rows_);
  for (Index r = 0; r < rows_; ++r) {
    Scalar s = 0;
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * v[indices_[k]];
    out[r] = s;
  }
  return out;
}

Vector SparseMatrix::multiply(const Vector& v) const {
  if (v.size() != cols_) throw DataError("spmv: shape mismatch");
  Vector out(rows_);
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows_; ++r) {
    Scalar s = 0;
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) s += values_[k] * v[indices_[k]];
    out[r] = s;
  }
  return out;
}

Vector SparseMatrix::multiply_t_serial(const Vector& v) const {
  if (v.size() != rows_) throw DataError("spmv_t: shape mismatch");
  Vector out = Vector::Zero(cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) out[indices_[k]] += values_[k] * v[r];
  return out;
}

Vector SparseMatrix::multiply_t(const Vector& v) const {
  if (v.size() != rows_) throw DataError("spmv_t: shape mismatch");
  const int nt = omp_get_max_threads();
  Matrix partial = Matrix::Zero(cols_, nt);
#pragma omp parallel num_threads(nt)
  {
    const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
    for (Index r = 0; r < rows_; ++r)
      for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k)
        partial(indices_[k], tid) += values_[k] * v[r];
  }
  // Reduce in fixed thread order so results do not depend on scheduling.
  Vector out = Vector::Zero(cols_);
  for (int t = 0; t < nt; ++t) out += partial.col(t);
  return out;
}

Matrix SparseMatrix::gather_columns(const std::vector<Index>& cols) const {
  Matrix out = Matrix::Zero(rows_, static_cast<Index>(cols.size()));
  std::vector<Index> pos(cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || cols[j] >= cols_) throw DataError("gather_columns: index out of range");
    pos[cols[j]] = static_cast<Index>(j);
  }
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k)
      if (pos[indices_[k]] >= 0) out(r, pos[indices_[k]]) = values_[k];
  return out;
}

Matrix SparseMatrix::to_dense() const {
  Matrix out = Matrix::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) out(r, indices_[k]) = values_[k];
  return out;
}

Scalar SparseMatrix::frobenius_norm() const {
  Scalar s = 0;
  for (Scalar v : values_) s += v * v;
  return std::sqrt(s);
}

SparseMatrix SparseMatrix::hcat(const std::vector<SparseMatrix>& blocks) {
  if (blocks.empty()) return SparseMatrix(0, 0);
  const Index rows = blocks.front().rows();
  Index cols = 0;
  std::size_t nnz = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw DataError("hcat: mismatched row counts");
    cols += b.cols();
    nnz += b.values_.size();
  }
  SparseMatrix a(rows, cols);
  a.indices_.reserve(nnz);
  a.values_.reserve(nnz);
  for (Index r = 0; r < rows; ++r) {
    Index off = 0;
    for (const auto& b : blocks) {
      for (Index k = b.offsets_[r]; k < b.offsets_[r + 1]; ++k) {
        a.indices_.push_back(b.indices_[k] + off);
        a.values_.push_back(b.values_[k]);
      }
      off += b.cols();
    }
    a.offsets_[r + 1] = static_cast<Index>(a.values_.size());
  }
  return a;
}

void SparseMatrix::write_triplets(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  char buf[80];
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%td %td %.17g\n", r, indices_[k], values_[k]);
      out << buf;
    }
}

SparseMatrix SparseMatrix::read_triplets(const std::string& path, Index rows, Index cols) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<Triplet> t;
  Index r, c;
  Scalar v;
  while (in >> r >> c >> v) t.push_back({r, c, v});
  return from_triplets(rows, cols, std::move(t));
}

Vector spmv(const SparseMatrix& a, const Vector& v) { return a.multiply(v); }
Vector spmv_t(const SparseMatrix& a, const Vector& v) { return a.multiply_t(v); }
Matrix sp_col_gather(const SparseMatrix& a, const std::vector<Index>& cols) {
  return a.gather_columns(cols);
}

}  // namespace mska
