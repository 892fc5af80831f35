#pragma once

#include <memory>
#include <string>

#include "mska/compression.hpp"
#include "mska/config.hpp"
#include "mska/kernel.hpp"
#include "mska/lasso.hpp"
#include "mska/subsample.hpp"

namespace mska {

/// Fitting data plus a disjoint evaluation set with reference values.
struct Dataset {
  Matrix points;
  Vector values;
  Matrix eval_points;
  Vector eval_values;
  Vector domain_lo, domain_hi;
  std::string function;  // builtin name when synthetic, empty for files
};

/// Seeded uniform samples of a builtin function on its domain.
Dataset make_function_dataset(const std::string& function, Index n, Index n_eval, uint64_t seed);

/// File-backed data: coordinate columns followed by one value column, or a
/// polygon mesh whose reflectance field is synthesized from the normals.
/// A seeded 10% vertex subset is held out for evaluation.
Dataset load_file_dataset(const std::string& path, Index dim, uint64_t seed);

Dataset make_dataset(const RunConfig& cfg);

/// Tree, basis, transformed data and the selected representatives.
struct SubsampleResult {
  std::shared_ptr<ClusterTree> tree;
  std::shared_ptr<SampletBasis> basis;
  Vector hsig;
  EnergyMode mode = EnergyMode::Xprime;
  Scalar total_energy = 0;
  Subsample subsample;
};

SubsampleResult run_subsample(const Matrix& points, const Vector& values, const RunConfig& cfg);

/// Dictionary construction from the schedule expressions (numbers or
/// multiples of rho_t / h_t) over the selected centers.
KernelDictionary build_dictionary(const RunConfig& cfg, const Subsample& sub);

struct SolveRun {
  KernelDictionary dict;
  IndexVector offsets;
  Vector beta;   // solver-coordinate solution per entry block
  Vector alpha;  // Dirac-coordinate coefficients per entry block
  ContinuationResult continuation;
  Scalar lambda = 0;
  Scalar lipschitz = 0;
  bool samplet_coordinates = true;
  SparseMatrix matrix;  // kept for optional export
};

SolveRun run_solve(const SubsampleResult& sub, const Matrix& points, const Vector& values,
                   const RunConfig& cfg);

/// s(x) = sum_l sum_i alpha_{l,i} K_l(x, c_i) on the evaluation points.
Vector evaluate_expansion(const KernelDictionary& dict, const IndexVector& offsets,
                          const Vector& alpha, const Matrix& eval_points);

/// Dense least squares for the unregularized baseline; falls back to the
/// normal equations when the gathered matrix would not fit in memory.
Vector least_squares_solve(const SparseMatrix& a, const Vector& b);

struct KernelSparsity {
  Scalar lengthscale = 0;
  Index active = 0;
  Index total = 0;
};

struct ErrorReport {
  Scalar e2 = 0;
  Scalar max_err = 0;
  std::vector<KernelSparsity> per_kernel;
  Index subsample_size = 0;
  Scalar separation = 0;
  Scalar fill = 0;
  std::string label;
};

struct TestCaseConfig {
  std::string name;  // 1A,1B,1C,2A,2B,2C,3,4
  Scalar scale = 0.1;
  uint64_t seed = 42;
  Index n_eval = 100000;
  std::string mesh_path;
  std::string out_dir;
};

/// Desk-scale reruns of the reference experiments: subsample, assemble,
/// solve (dense factorization for test 1, continuation TR-SSN otherwise)
/// and evaluate; writes metrics.csv when out_dir is set.
std::vector<ErrorReport> run_test(const TestCaseConfig& tc);

}  // namespace mska
