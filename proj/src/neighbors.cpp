#include "mska/neighbors.hpp"

#include <cmath>
#include <limits>

namespace mska {

namespace {

Scalar point_box_distance(const Eigen::Ref<const Vector>& x, const ClusterNode& nd) {
  Scalar s = 0;
  for (Index k = 0; k < x.size(); ++k) {
    const Scalar gap = std::max({Scalar(0), nd.bbox_min[k] - x[k], x[k] - nd.bbox_max[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

void nn_recurse(const ClusterTree& tree, Index v, const Eigen::Ref<const Vector>& x,
                Index exclude, Index& best_idx, Scalar& best_dist) {
  const ClusterNode& nd = tree.node(v);
  if (point_box_distance(x, nd) >= best_dist) return;
  if (nd.is_leaf()) {
    const auto& pts = tree.permuted_points();
    const auto& to_orig = tree.permutation().to_original;
    for (Index i = nd.begin; i < nd.end; ++i) {
      if (to_orig[i] == exclude) continue;
      const Scalar dist = (pts.row(i).transpose() - x).norm();
      if (dist < best_dist || (dist == best_dist && to_orig[i] < best_idx)) {
        best_dist = dist;
        best_idx = to_orig[i];
      }
    }
    return;
  }
  const Scalar d0 = point_box_distance(x, tree.node(nd.child[0]));
  const Scalar d1 = point_box_distance(x, tree.node(nd.child[1]));
  const Index first = d0 <= d1 ? 0 : 1;
  nn_recurse(tree, nd.child[first], x, exclude, best_idx, best_dist);
  nn_recurse(tree, nd.child[1 - first], x, exclude, best_idx, best_dist);
}

}  // namespace

std::pair<Index, Scalar> nearest_site(const ClusterTree& tree, const Eigen::Ref<const Vector>& x,
                                      Index exclude_original) {
  Index best_idx = -1;
  Scalar best_dist = std::numeric_limits<Scalar>::infinity();
  nn_recurse(tree, 0, x, exclude_original, best_idx, best_dist);
  return {best_idx, best_dist};
}

Scalar separation_radius(const Matrix& pts) {
  const Index n = pts.rows();
  if (n < 2) throw DataError("separation radius needs at least two points");
  auto [tree, perm] = build_cluster_tree(PointSet(pts), 16);
  Scalar sep = std::numeric_limits<Scalar>::infinity();
#pragma omp parallel for schedule(static) reduction(min : sep)
  for (Index i = 0; i < n; ++i) {
    const auto [idx, dist] = nearest_site(tree, pts.row(i).transpose(), i);
    sep = std::min(sep, dist);
  }
  return sep;
}

Scalar separation_radius_brute(const Matrix& pts) {
  const Index n = pts.rows();
  if (n < 2) throw DataError("separation radius needs at least two points");
  Scalar sep = std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      sep = std::min(sep, (pts.row(i) - pts.row(j)).norm());
  return sep;
}

Scalar fill_distance(const Matrix& sites, const Matrix& centers) {
  if (centers.rows() < 1) throw DataError("fill distance needs at least one center");
  auto [tree, perm] = build_cluster_tree(PointSet(centers), 16);
  Scalar fill = 0;
#pragma omp parallel for schedule(static) reduction(max : fill)
  for (Index i = 0; i < sites.rows(); ++i) {
    const auto [idx, dist] = nearest_site(tree, sites.row(i).transpose());
    fill = std::max(fill, dist);
  }
  return fill;
}

Scalar fill_distance_brute(const Matrix& sites, const Matrix& centers) {
  Scalar fill = 0;
  for (Index i = 0; i < sites.rows(); ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Index j = 0; j < centers.rows(); ++j)
      best = std::min(best, (sites.row(i) - centers.row(j)).norm());
    fill = std::max(fill, best);
  }
  return fill;
}

}  // namespace mska
