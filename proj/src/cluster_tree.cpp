#include "mska/cluster_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mska {

namespace {

struct BBox {
  Vector lo, hi;
};

BBox tight_bbox(const Matrix& pts, const IndexVector& idx, Index begin, Index end) {
  const Index d = pts.cols();
  BBox box{Vector::Constant(d, std::numeric_limits<Scalar>::infinity()),
           Vector::Constant(d, -std::numeric_limits<Scalar>::infinity())};
  for (Index i = begin; i < end; ++i) {
    for (Index k = 0; k < d; ++k) {
      const Scalar v = pts(idx[i], k);
      box.lo[k] = std::min(box.lo[k], v);
      box.hi[k] = std::max(box.hi[k], v);
    }
  }
  return box;
}

}  // namespace

std::pair<ClusterTree, Permutation> build_cluster_tree(const PointSet& points,
                                                       Index leaf_capacity, SplitRule rule) {
  points.validate();
  if (leaf_capacity < 1) throw UsageError("leaf_capacity must be >= 1");

  const Matrix& P = points.coords;
  const Index n = P.rows();
  const Index d = P.cols();

  IndexVector idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});

  ClusterTree tree;
  tree.nodes_.reserve(2 * (n / std::max<Index>(leaf_capacity, 1) + 1));

  // Iterative construction with an explicit stack; children partition the
  // parent's range of idx in place.
  struct Item {
    Index node;
    Index begin, end;
    Index depth;
  };
  std::vector<Item> stack;

  auto make_node = [&](Index begin, Index end, Index depth, Index parent) {
    ClusterNode nd;
    nd.begin = begin;
    nd.end = end;
    nd.depth = depth;
    nd.parent = parent;
    const BBox box = tight_bbox(P, idx, begin, end);
    nd.bbox_min = box.lo;
    nd.bbox_max = box.hi;
    nd.diameter = (box.hi - box.lo).norm();
    Vector c = Vector::Zero(d);
    for (Index i = begin; i < end; ++i) c += P.row(idx[i]).transpose();
    nd.centroid = c / Scalar(end - begin);
    tree.nodes_.push_back(std::move(nd));
    return static_cast<Index>(tree.nodes_.size()) - 1;
  };

  const Index root = make_node(0, n, 0, -1);
  stack.push_back({root, 0, n, 0});

  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    ClusterNode& nd = tree.nodes_[it.node];
    tree.depth_ = std::max(tree.depth_, it.depth);
    const Index count = it.end - it.begin;
    if (count <= leaf_capacity) continue;  // leaf

    // Longest bbox edge determines the split axis.
    Index axis = 0;
    (nd.bbox_max - nd.bbox_min).maxCoeff(&axis);
    if (nd.bbox_max[axis] - nd.bbox_min[axis] <= Scalar(0) && rule == SplitRule::Midpoint)
      continue;  // all points coincide; midpoint split cannot make progress

    auto less = [&](Index a, Index b) {
      const Scalar pa = P(a, axis), pb = P(b, axis);
      return pa < pb || (pa == pb && a < b);
    };

    Index mid;
    if (rule == SplitRule::Median) {
      mid = it.begin + count / 2;
      std::nth_element(idx.begin() + it.begin, idx.begin() + mid, idx.begin() + it.end, less);
    } else {
      const Scalar cut = 0.5 * (nd.bbox_min[axis] + nd.bbox_max[axis]);
      auto split = std::partition(idx.begin() + it.begin, idx.begin() + it.end,
                                  [&](Index a) { return P(a, axis) < cut; });
      mid = static_cast<Index>(split - idx.begin());
      if (mid == it.begin || mid == it.end) {  // degenerate cut, fall back to median
        mid = it.begin + count / 2;
        std::nth_element(idx.begin() + it.begin, idx.begin() + mid, idx.begin() + it.end, less);
      }
    }

    const Index left = make_node(it.begin, mid, it.depth + 1, it.node);
    const Index right = make_node(mid, it.end, it.depth + 1, it.node);
    tree.nodes_[it.node].child[0] = left;
    tree.nodes_[it.node].child[1] = right;
    stack.push_back({right, mid, it.end, it.depth + 1});
    stack.push_back({left, it.begin, mid, it.depth + 1});
  }

  // Freeze the permutation and reorder point storage.
  Permutation perm;
  perm.to_original = idx;
  perm.to_tree.resize(n);
  for (Index i = 0; i < n; ++i) perm.to_tree[idx[i]] = i;
  tree.points_.resize(n, d);
  for (Index i = 0; i < n; ++i) tree.points_.row(i) = P.row(idx[i]);
  tree.perm_ = perm;

  for (Index i = 0; i < tree.node_count(); ++i)
    if (tree.nodes_[i].is_leaf()) tree.leaves_.push_back(i);
  std::sort(tree.leaves_.begin(), tree.leaves_.end(),
            [&](Index a, Index b) { return tree.nodes_[a].begin < tree.nodes_[b].begin; });

  return {std::move(tree), std::move(perm)};
}

Scalar node_distance(const ClusterNode& a, const ClusterNode& b) {
  if (a.bbox_min.size() != b.bbox_min.size())
    throw DataError("node_distance: dimension mismatch");
  Scalar s = 0;
  for (Index k = 0; k < a.bbox_min.size(); ++k) {
    const Scalar gap = std::max({Scalar(0), a.bbox_min[k] - b.bbox_max[k],
                                 b.bbox_min[k] - a.bbox_max[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

}  // namespace mska
