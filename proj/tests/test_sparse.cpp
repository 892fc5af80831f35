#include <doctest.h>

#include <filesystem>
#include <random>

#include "mska/sparse_matrix.hpp"
#include "oracles.hpp"

using namespace mska;

namespace {

SparseMatrix random_sparse(Index rows, Index cols, Index per_row, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> col(0, cols - 1);
  std::normal_distribution<Scalar> normal;
  std::vector<Triplet> t;
  for (Index r = 0; r < rows; ++r)
    for (Index k = 0; k < per_row; ++k) t.push_back({r, col(rng), normal(rng)});
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace

TEST_CASE("identity spmv") {
  const SparseMatrix eye = SparseMatrix::identity(20);
  const Vector v = oracles::random_vector(20, 1);
  CHECK((spmv(eye, v) - v).norm() == 0.0);
  CHECK((spmv_t(eye, v) - v).norm() == 0.0);
}

TEST_CASE("sparse products match the dense oracle") {
  const SparseMatrix a = random_sparse(100, 80, 7, 2);
  const Matrix dense = a.to_dense();
  const Vector v = oracles::random_vector(80, 3);
  const Vector u = oracles::random_vector(100, 4);
  CHECK((a.multiply(v) - dense * v).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.multiply_t(u) - dense.transpose() * u).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((a.multiply(v) - a.multiply_serial(v)).norm() == 0.0);
  CHECK((a.multiply_t(u) - a.multiply_t_serial(u)).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK_THROWS_AS(a.multiply(Vector::Zero(3)), DataError);
}

TEST_CASE("column gather") {
  const SparseMatrix a = random_sparse(50, 40, 5, 5);
  const Matrix dense = a.to_dense();
  const std::vector<Index> cols{3, 17, 39, 0};
  const Matrix block = sp_col_gather(a, cols);
  for (std::size_t j = 0; j < cols.size(); ++j)
    CHECK((block.col(static_cast<Index>(j)) - dense.col(cols[j])).norm() == 0.0);
  CHECK(sp_col_gather(a, {}).cols() == 0);
}

TEST_CASE("horizontal concatenation preserves offsets") {
  const SparseMatrix a = random_sparse(30, 10, 3, 6);
  const SparseMatrix b = random_sparse(30, 15, 3, 7);
  const SparseMatrix c = SparseMatrix::hcat({a, b});
  CHECK(c.cols() == 25);
  CHECK(c.nnz() == a.nnz() + b.nnz());
  Matrix expect(30, 25);
  expect << a.to_dense(), b.to_dense();
  CHECK((c.to_dense() - expect).norm() == 0.0);
}

TEST_CASE("triplet file roundtrip") {
  const SparseMatrix a = random_sparse(25, 25, 4, 8);
  const std::string path = (std::filesystem::temp_directory_path() / "mska_trip.txt").string();
  a.write_triplets(path);
  const SparseMatrix b = SparseMatrix::read_triplets(path, 25, 25);
  CHECK((a.to_dense() - b.to_dense()).norm() == 0.0);
  std::filesystem::remove(path);
}
