#pragma once

#include <string>
#include <vector>

#include "mska/lin_op.hpp"
#include "mska/point_set.hpp"
#include "mska/types.hpp"

namespace mska {

enum class KernelFamily { Exponential, Gaussian, Matern32 };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

/// Radial kernel with unit diagonal: K(x,x) = 1, values in (0, 1].
struct KernelModel {
  KernelFamily family = KernelFamily::Exponential;
  Scalar lengthscale = 1.0;

  Scalar operator()(Scalar dist) const;
};

Scalar eval_kernel(const KernelModel& model, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& y);

/// One block of the multi-kernel dictionary: a kernel paired with its centers.
struct DictionaryEntry {
  KernelModel model;
  Matrix centers;  // N_l x d
};

/// Ordered list of (kernel, center set) pairs; the column space of the
/// concatenated Gramian [K_1, ..., K_L].
struct KernelDictionary {
  std::vector<DictionaryEntry> entries;

  Index total_columns() const {
    Index m = 0;
    for (const auto& e : entries) m += e.centers.rows();
    return m;
  }
  /// Starting column of each entry plus the total as final element.
  IndexVector column_offsets() const {
    IndexVector off{0};
    for (const auto& e : entries) off.push_back(off.back() + e.centers.rows());
    return off;
  }
};

/// Geometric lengthscale ladder l_j = a (b/a)^((j-1)/(L-1)), j = 1..L.
struct LengthscaleSchedule {
  Scalar a = 1.0;
  Scalar b = 1.0;
  Index count = 1;

  std::vector<Scalar> values() const;
};

/// Dense Gramian block between row points and one center set; OpenMP over
/// row blocks. Rejects duplicate centers (positive definiteness premise).
Matrix assemble_dense_block(const Matrix& rows, const KernelModel& model, const Matrix& centers);

/// Dense N x M multi-kernel Gramian; guarded against oversize allocations.
Matrix assemble_dense(const PointSet& rows, const KernelDictionary& dict);

struct LipschitzEstimate {
  Scalar value = 0.0;             // final Rayleigh quotient, ~ sigma_max(K)^2
  Index iterations = 0;
  bool zero_operator = false;     // lambda = 2/L undefined in this case
  std::vector<Scalar> history;    // Rayleigh quotient per iteration
};

/// Power iteration on K^t K with a fixed-seed start vector; stops once the
/// relative eigenvalue change drops below 1e-4 or after 200 iterations.
LipschitzEstimate estimate_lipschitz(const LinOp& op, Scalar rel_tol = 1e-4, Index maxit = 200);

}  // namespace mska
