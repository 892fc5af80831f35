#pragma once

#include <optional>

#include "mska/kernel.hpp"
#include "mska/samplets.hpp"
#include "mska/sparse_matrix.hpp"

namespace mska {

struct CompressionConfig {
  Scalar rho = 2.0;      // admissibility parameter; pipeline default is d
  Scalar kappa = 1e-7;   // a-posteriori relative threshold (Frobenius)
};

/// Far-field test licensing the dropping of the (tau, nu) coefficient block.
/// Touching clusters are never admissible, also when both diameters vanish.
inline bool admissible(const ClusterNode& tau, const ClusterNode& nu, Scalar rho) {
  const Scalar dist = node_distance(tau, nu);
  return dist > 0 && dist >= rho * std::max(tau.diameter, nu.diameter);
}

/// Samplet-compressed square Gramian T K T^t. Blocks whose supporting cluster
/// pair passes the admissibility test are dropped; every kept block is exact.
/// Entries below kappa * ||.||_F (norm estimated from the kept entries) are
/// removed afterwards.
SparseMatrix assemble_compressed_square(const SampletBasis& basis, const KernelModel& model,
                                        const CompressionConfig& cfg);

/// Rectangular multi-kernel assembly [T K_1 C_1, ..., T K_L C_L] where C_l is
/// T_l^t when the l-th entry carries its own samplet basis and the identity
/// otherwise (row-only mode). Per-entry blocks are compressed independently
/// and concatenated with their column offsets preserved.
SparseMatrix assemble_compressed_rect(const SampletBasis& row_basis, const KernelDictionary& dict,
                                      const std::vector<const SampletBasis*>& col_bases,
                                      const CompressionConfig& cfg);

}  // namespace mska
