#pragma once

#include <vector>

#include "mska/samplets.hpp"
#include "mska/sparse_matrix.hpp"
#include "mska/types.hpp"

namespace mska {

enum class EnergyMode { Xprime, Hprime };

/// Diagonal surrogate of the Gramian in samplet coordinates: d_i = z_i / h_i
/// with d_i = 0 whenever h_i = 0, so that h^t diag(d) h = h^t z exactly.
struct LumpedDiagonal {
  Vector d;
};

LumpedDiagonal make_lumped_diagonal(const Vector& hsig, const Vector& zsig);

/// Per-cluster energies: e accumulates bottom-up, etilde propagates top-down.
struct EnergyTree {
  const ClusterTree* tree = nullptr;
  EnergyMode mode = EnergyMode::Xprime;
  Vector e;
  Vector etilde;

  Scalar total() const { return e[0]; }
};

/// Bottom-up accumulation: each cluster sums its children plus its own
/// samplet contributions ((h_g)^2 or d_g (h_g)^2); the root also carries the
/// scaling block.
EnergyTree compute_energies(const SampletBasis& basis, const Vector& hsig, EnergyMode mode,
                            const LumpedDiagonal* weights = nullptr);

/// Top-down redistribution: the root keeps e, every child of tau receives
/// [sum of children energies] * etilde(tau) / (e(tau) + etilde(tau)), with the
/// division guarded at 0.
void propagate_modified_energies(EnergyTree& et);

/// Ancestor-closed subtree containing the root: keeps every cluster whose
/// |etilde| exceeds t = eps2 * hnorm_sq together with its ancestors. The
/// threshold normalizes by ||h^S||^2 in both energy modes.
struct AdaptiveSubtree {
  std::vector<char> member;  // per tree node
  IndexVector leaves;        // subtree leaves, left-to-right
};

AdaptiveSubtree adaptive_subtree(const EnergyTree& et, Scalar hnorm_sq, Scalar eps2);

/// Representative data sites: one per subtree leaf, the site closest to the
/// leaf's centroid (ties broken by smallest original index).
struct Subsample {
  IndexVector indices;  // original point indices, leaf order
  Matrix points;        // |X_t| x d
  Scalar separation;    // rho_{X_t}
  Scalar fill;          // h_{X_t}, measured against the full input set
  Scalar eps2 = 0;
  EnergyMode mode = EnergyMode::Xprime;
};

Subsample select_representatives(const AdaptiveSubtree& subtree, const ClusterTree& tree);

}  // namespace mska
