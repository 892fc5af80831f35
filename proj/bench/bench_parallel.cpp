// Compares the OpenMP kernels against their serial reference implementations
// on representative sizes and reports timings plus max deviations.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "mska/kernel.hpp"
#include "mska/neighbors.hpp"
#include "mska/samplets.hpp"
#include "mska/sparse_matrix.hpp"

using namespace mska;

namespace {

double now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

Matrix random_points(Index n, Index d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
  Matrix pts(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) pts(i, k) = unit(rng);
  return pts;
}

struct Row {
  const char* name;
  double serial;
  double parallel;
  double deviation;
};

void print(const Row& row) {
  std::printf("%-28s %10.3f ms %10.3f ms   speedup %5.2fx   max dev %.3e\n", row.name,
              1e3 * row.serial, 1e3 * row.parallel, row.serial / row.parallel, row.deviation);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %13s %13s\n", "kernel", "serial", "openmp");

  {  // dense kernel assembly
    const Matrix pts = random_points(4000, 2, 1);
    const KernelModel model{KernelFamily::Matern32, 0.5};
    double t0 = now();
    Matrix ref(pts.rows(), pts.rows());
    for (Index i = 0; i < pts.rows(); ++i)
      for (Index j = 0; j < pts.rows(); ++j)
        ref(i, j) = model((pts.row(i) - pts.row(j)).norm());
    double t1 = now();
    const Matrix par = assemble_dense_block(pts, model, pts);
    double t2 = now();
    print({"dense assembly 4000x4000", t1 - t0, t2 - t1, (ref - par).cwiseAbs().maxCoeff()});
  }

  {  // samplet transform on a block of vectors
    const Matrix pts = random_points(65536, 2, 2);
    auto [tree, perm] = build_cluster_tree(PointSet(pts), 20);
    const SampletBasis basis = compute_samplet_basis(tree, make_moment_spec(3, 2));
    std::mt19937_64 rng(3);
    std::normal_distribution<Scalar> normal;
    Matrix block(pts.rows(), 32);
    for (Index i = 0; i < block.size(); ++i) block.data()[i] = normal(rng);
    double t0 = now();
    const Matrix ref = basis.forward_permuted_cols(block, false);
    double t1 = now();
    const Matrix par = basis.forward_permuted_cols(block, true);
    double t2 = now();
    print({"samplet transform 65536x32", t1 - t0, t2 - t1, (ref - par).cwiseAbs().maxCoeff()});
  }

  {  // sparse matrix-vector products
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<Index> col(0, 99999);
    std::normal_distribution<Scalar> normal;
    std::vector<Triplet> trips;
    for (Index r = 0; r < 100000; ++r)
      for (int k = 0; k < 60; ++k) trips.push_back({r, col(rng), normal(rng)});
    const SparseMatrix a = SparseMatrix::from_triplets(100000, 100000, std::move(trips));
    Vector v(a.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    double t0 = now();
    const Vector ref = a.multiply_serial(v);
    double t1 = now();
    const Vector par = a.multiply(v);
    double t2 = now();
    print({"spmv 1e5 rows, 60 nnz/row", t1 - t0, t2 - t1, (ref - par).cwiseAbs().maxCoeff()});
    t0 = now();
    const Vector reft = a.multiply_t_serial(v);
    t1 = now();
    const Vector part = a.multiply_t(v);
    t2 = now();
    print({"spmv_t 1e5x1e5", t1 - t0, t2 - t1, (reft - part).cwiseAbs().maxCoeff()});
  }

  {  // fill distance
    const Matrix sites = random_points(200000, 2, 5);
    const Matrix centers = random_points(2000, 2, 6);
    double t0 = now();
    const Scalar ref = fill_distance_brute(sites.topRows(20000), centers);
    double t1 = now();
    const Scalar par = fill_distance(sites.topRows(20000), centers);
    double t2 = now();
    print({"fill distance 2e4 sites", t1 - t0, t2 - t1, std::abs(ref - par)});
  }
  return 0;
}
