#pragma once

#include <vector>

#include "mska/cluster_tree.hpp"
#include "mska/types.hpp"

namespace mska {

/// Vanishing-moment configuration: samplets annihilate all polynomials of
/// total degree <= q; m_q = C(q+d, d) monomials span that space.
struct MomentSpec {
  Index q = 3;
  Index d = 2;
  Index m_q = 10;
};

MomentSpec make_moment_spec(Index q, Index d);

enum class CoeffBasis { Dirac, Samplet };

/// Length-N coefficient vector tagged with the basis it lives in.
struct CoefficientVector {
  Vector values;
  CoeffBasis basis = CoeffBasis::Dirac;
};

/// Orthogonal multiresolution basis on the cluster tree. Every tree node
/// carries a square orthogonal block splitting its incoming coefficients into
/// scaling rows (passed up) and samplet rows (emitted). The global ordering
/// puts the root scaling block first, then samplets by increasing level and
/// left-to-right cluster order within a level.
class SampletBasis {
 public:
  SampletBasis() = default;

  const ClusterTree& tree() const { return *tree_; }
  const MomentSpec& spec() const { return spec_; }
  Index size() const { return n_; }
  Index root_scaling_count() const { return root_scaling_count_; }
  Index num_levels() const { return num_levels_; }

  const Matrix& block(Index node) const { return blocks_[node]; }
  Index scaling_count(Index node) const { return nscal_[node]; }
  Index samplet_count(Index node) const { return nin_[node] - nscal_[node]; }
  Index incoming_count(Index node) const { return nin_[node]; }
  Index samplet_offset(Index node) const { return samplet_offset_[node]; }

  /// Level of the coefficient with global index g: 0 for the root scaling
  /// block, depth+1 for samplets of a cluster.
  Index level_of(Index g) const { return level_of_[g]; }
  /// Supporting cluster of coefficient g (root also owns the scaling block).
  Index owner_node(Index g) const { return owner_node_[g]; }
  const IndexVector& level_counts() const { return level_counts_; }

  /// T v for a Dirac-basis vector in original point order; O(N) for fixed q.
  Vector forward(const Vector& v, bool parallel = true) const;
  /// T^t w back to Dirac coordinates in original point order.
  Vector inverse(const Vector& w, bool parallel = true) const;

  /// Applies the transform to every column of a matrix whose rows are already
  /// in tree-permuted point order (assembly internals).
  Matrix forward_permuted_cols(const Matrix& m, bool parallel = true) const;

  /// Dense N x N transform matrix over original point order; test/debug aid,
  /// quadratic storage.
  Matrix dense_transform() const;

  /// Multiply count of one fast transform pass (linear-scaling audit).
  Index transform_operation_count() const;

  friend SampletBasis compute_samplet_basis(const ClusterTree& tree, const MomentSpec& spec);

 private:
  const ClusterTree* tree_ = nullptr;
  MomentSpec spec_;
  Index n_ = 0;
  Index root_scaling_count_ = 0;
  Index num_levels_ = 0;
  std::vector<Matrix> blocks_;
  IndexVector nscal_, nin_, samplet_offset_;
  IndexVector level_of_, owner_node_;
  IndexVector level_counts_;
};

/// Builds the per-node orthogonal blocks bottom-up from moment matrices in
/// cluster-local coordinates. Rank-deficient moment matrices (degenerate
/// geometry, tiny leaves) reduce the scaling block instead of failing.
SampletBasis compute_samplet_basis(const ClusterTree& tree, const MomentSpec& spec);

CoefficientVector forward_transform(const SampletBasis& basis, const CoefficientVector& v);
CoefficientVector inverse_transform(const SampletBasis& basis, const CoefficientVector& w);

}  // namespace mska
