#include "mska/subsample.hpp"

#include <cmath>
#include <numeric>

#include "mska/neighbors.hpp"

namespace mska {

LumpedDiagonal make_lumped_diagonal(const Vector& hsig, const Vector& zsig) {
  if (hsig.size() != zsig.size()) throw DataError("lumped diagonal: length mismatch");
  LumpedDiagonal out;
  out.d.resize(hsig.size());
  for (Index i = 0; i < hsig.size(); ++i)
    out.d[i] = hsig[i] == Scalar(0) ? Scalar(0) : zsig[i] / hsig[i];
  if (!out.d.allFinite()) throw DataError("lumped diagonal: non-finite weights");
  return out;
}

EnergyTree compute_energies(const SampletBasis& basis, const Vector& hsig, EnergyMode mode,
                            const LumpedDiagonal* weights) {
  if (hsig.size() != basis.size()) throw DataError("compute_energies: length mismatch");
  if (mode == EnergyMode::Hprime && weights == nullptr)
    throw UsageError("Hprime energies need the lumped diagonal weights");
  if (mode == EnergyMode::Xprime && weights != nullptr)
    throw UsageError("Xprime energies take no weights");

  const ClusterTree& tree = basis.tree();
  EnergyTree et;
  et.tree = &tree;
  et.mode = mode;
  et.e = Vector::Zero(tree.node_count());
  et.etilde = Vector::Zero(tree.node_count());

  // Samplets are attributed to their supporting cluster; the root also owns
  // the scaling block (owner_node already encodes both).
  for (Index g = 0; g < basis.size(); ++g) {
    const Scalar h = hsig[g];
    const Scalar c = mode == EnergyMode::Xprime ? h * h : weights->d[g] * h * h;
    et.e[basis.owner_node(g)] += c;
  }
  // Children precede nothing in preorder, so reverse order accumulates up.
  for (Index v = tree.node_count() - 1; v >= 0; --v) {
    const ClusterNode& nd = tree.node(v);
    if (!nd.is_leaf()) et.e[v] += et.e[nd.child[0]] + et.e[nd.child[1]];
  }
  return et;
}

void propagate_modified_energies(EnergyTree& et) {
  const ClusterTree& tree = *et.tree;
  et.etilde[0] = et.e[0];
  // Preorder guarantees parents are visited before children.
  for (Index v = 0; v < tree.node_count(); ++v) {
    const ClusterNode& nd = tree.node(v);
    if (nd.is_leaf()) continue;
    const Scalar child_sum = et.e[nd.child[0]] + et.e[nd.child[1]];
    const Scalar denom = et.e[v] + et.etilde[v];
    const Scalar q = denom == Scalar(0) ? Scalar(0) : child_sum * et.etilde[v] / denom;
    et.etilde[nd.child[0]] = q;
    et.etilde[nd.child[1]] = q;
  }
}

AdaptiveSubtree adaptive_subtree(const EnergyTree& et, Scalar hnorm_sq, Scalar eps2) {
  if (eps2 <= 0) throw UsageError("adaptive_subtree: eps2 must be positive");
  const ClusterTree& tree = *et.tree;
  const Index nn = tree.node_count();
  const Scalar t = eps2 * hnorm_sq;

  AdaptiveSubtree out;
  out.member.assign(nn, 0);
  out.member[0] = 1;
  for (Index v = 0; v < nn; ++v)
    if (std::abs(et.etilde[v]) > t) out.member[v] = 1;
  // Ancestor closure, children have larger preorder indices than parents.
  for (Index v = nn - 1; v > 0; --v)
    if (out.member[v]) out.member[tree.node(v).parent] = 1;
  for (Index v = 0; v < nn; ++v) {
    if (!out.member[v]) continue;
    const ClusterNode& nd = tree.node(v);
    const bool leaf = nd.is_leaf() || (!out.member[nd.child[0]] && !out.member[nd.child[1]]);
    if (leaf) out.leaves.push_back(v);
  }
  std::sort(out.leaves.begin(), out.leaves.end(),
            [&](Index a, Index b) { return tree.node(a).begin < tree.node(b).begin; });
  return out;
}

Subsample select_representatives(const AdaptiveSubtree& subtree, const ClusterTree& tree) {
  if (subtree.leaves.empty()) throw UsageError("select_representatives: empty subtree");
  const auto& pts = tree.permuted_points();
  const auto& to_orig = tree.permutation().to_original;

  Subsample out;
  out.indices.reserve(subtree.leaves.size());
  out.points.resize(static_cast<Index>(subtree.leaves.size()), tree.dim());

  for (std::size_t li = 0; li < subtree.leaves.size(); ++li) {
    const ClusterNode& nd = tree.node(subtree.leaves[li]);
    Index best = -1;
    Scalar best_dist = std::numeric_limits<Scalar>::infinity();
    for (Index i = nd.begin; i < nd.end; ++i) {
      const Scalar dist = (pts.row(i).transpose() - nd.centroid).norm();
      const Index orig = to_orig[i];
      if (dist < best_dist || (dist == best_dist && orig < best)) {
        best_dist = dist;
        best = orig;
      }
    }
    out.indices.push_back(best);
    out.points.row(static_cast<Index>(li)) = pts.row(tree.permutation().to_tree[best]);
  }

  out.separation = out.points.rows() > 1 ? separation_radius(out.points)
                                         : std::numeric_limits<Scalar>::infinity();
  out.fill = fill_distance(pts, out.points);
  return out;
}

}  // namespace mska
