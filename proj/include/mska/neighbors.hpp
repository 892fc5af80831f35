#pragma once

#include "mska/cluster_tree.hpp"
#include "mska/types.hpp"

namespace mska {

/// Distance from a point to the nearest site in the tree, excluding one
/// original index (pass -1 to disable). Branch-and-bound over bounding boxes.
std::pair<Index, Scalar> nearest_site(const ClusterTree& tree, const Eigen::Ref<const Vector>& x,
                                      Index exclude_original = -1);

/// Minimum pairwise distance among the given points.
Scalar separation_radius(const Matrix& pts);
Scalar separation_radius_brute(const Matrix& pts);  // O(n^2) reference

/// Maximum over all sites of the distance to the nearest center.
Scalar fill_distance(const Matrix& sites, const Matrix& centers);
Scalar fill_distance_brute(const Matrix& sites, const Matrix& centers);  // reference

}  // namespace mska
