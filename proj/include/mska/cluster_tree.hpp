#pragma once

#include <vector>

#include "mska/point_set.hpp"
#include "mska/types.hpp"

namespace mska {

enum class SplitRule { Median, Midpoint };

/// Bijection between original point indices and tree-contiguous storage order.
struct Permutation {
  IndexVector to_original;  // tree position -> original index
  IndexVector to_tree;      // original index -> tree position
};

struct ClusterNode {
  Index begin = 0;  // half-open range into tree order
  Index end = 0;
  Index child[2] = {-1, -1};
  Index parent = -1;
  Index depth = 0;
  Vector bbox_min;
  Vector bbox_max;
  Vector centroid;
  Scalar diameter = 0.0;

  Index size() const { return end - begin; }
  bool is_leaf() const { return child[0] < 0; }
};

/// Balanced binary spatial partition of the data sites. Immutable after
/// construction; concurrent read-only traversal is safe.
class ClusterTree {
 public:
  ClusterTree() = default;

  const ClusterNode& node(Index i) const { return nodes_[i]; }
  const ClusterNode& root() const { return nodes_[0]; }
  Index node_count() const { return static_cast<Index>(nodes_.size()); }
  Index num_points() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  Index depth() const { return depth_; }

  /// Points in tree storage order (row i = point at tree position i).
  const Matrix& permuted_points() const { return points_; }
  const Permutation& permutation() const { return perm_; }

  /// Leaves in tree (left-to-right) order.
  const IndexVector& leaves() const { return leaves_; }

  friend std::pair<ClusterTree, Permutation> build_cluster_tree(const PointSet& points,
                                                                Index leaf_capacity,
                                                                SplitRule rule);

 private:
  std::vector<ClusterNode> nodes_;
  Matrix points_;  // N x d, tree order
  Permutation perm_;
  IndexVector leaves_;
  Index depth_ = 0;
};

/// Builds the tree by recursive splitting on the longest bounding-box axis.
/// Splitting stops once a node holds <= leaf_capacity points. Bounding boxes
/// are recomputed tightly from the contained points after each split.
std::pair<ClusterTree, Permutation> build_cluster_tree(const PointSet& points,
                                                       Index leaf_capacity,
                                                       SplitRule rule = SplitRule::Median);

/// Euclidean distance between the bounding boxes of two nodes (0 if they
/// intersect). Lower-bounds the distance between the contained point sets.
Scalar node_distance(const ClusterNode& a, const ClusterNode& b);

}  // namespace mska
