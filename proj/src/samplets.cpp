#include "mska/samplets.hpp"

#include <Eigen/QR>
#include <iostream>

#include "mska/monomials.hpp"

namespace mska {

namespace {
constexpr Scalar kRankTol = 1e-10;

Vector node_center(const ClusterNode& nd) { return 0.5 * (nd.bbox_min + nd.bbox_max); }

Vector node_scale(const ClusterNode& nd) {
  Vector s = 0.5 * (nd.bbox_max - nd.bbox_min);
  for (Index k = 0; k < s.size(); ++k)
    if (s[k] <= Scalar(0)) s[k] = 1.0;
  return s;
}
}  // namespace

MomentSpec make_moment_spec(Index q, Index d) {
  if (q < 0) throw UsageError("moment degree q must be >= 0");
  MomentSpec spec;
  spec.q = q;
  spec.d = d;
  spec.m_q = static_cast<Index>(std::llround(binomial(q + d, d)));
  return spec;
}

SampletBasis compute_samplet_basis(const ClusterTree& tree, const MomentSpec& spec) {
  SampletBasis basis;
  basis.tree_ = &tree;
  basis.spec_ = spec;
  basis.n_ = tree.num_points();

  const Index nn = tree.node_count();
  basis.blocks_.resize(nn);
  basis.nscal_.assign(nn, 0);
  basis.nin_.assign(nn, 0);
  basis.samplet_offset_.assign(nn, 0);

  const auto exps = monomial_exponents(spec.q, spec.d);
  std::vector<Matrix> scal_moments(nn);  // per node, local frame, freed bottom-up
  Index rank_warnings = 0;

  // Nodes are stored in preorder, so reverse index order visits children first.
  for (Index v = nn - 1; v >= 0; --v) {
    const ClusterNode& nd = tree.node(v);
    const Vector c = node_center(nd);
    const Vector s = node_scale(nd);

    Matrix min;  // moment matrix of incoming distributions, m_q x nin
    if (nd.is_leaf()) {
      min = monomial_moments(tree.permuted_points().middleRows(nd.begin, nd.size()), c, s, exps);
    } else {
      const Index c0 = nd.child[0], c1 = nd.child[1];
      const ClusterNode& n0 = tree.node(c0);
      const ClusterNode& n1 = tree.node(c1);
      min.resize(static_cast<Index>(exps.size()), basis.nscal_[c0] + basis.nscal_[c1]);
      min.leftCols(basis.nscal_[c0]) =
          monomial_shift_matrix(exps, node_center(n0), node_scale(n0), c, s) * scal_moments[c0];
      min.rightCols(basis.nscal_[c1]) =
          monomial_shift_matrix(exps, node_center(n1), node_scale(n1), c, s) * scal_moments[c1];
      scal_moments[c0].resize(0, 0);
      scal_moments[c1].resize(0, 0);
    }

    const Index nin = min.cols();
    Eigen::ColPivHouseholderQR<Matrix> qr(min.transpose());
    qr.setThreshold(kRankTol);
    const Index rank = qr.rank();
    if (rank < std::min<Index>(nin, spec.m_q)) ++rank_warnings;

    Matrix qfull = qr.householderQ() * Matrix::Identity(nin, nin);
    basis.blocks_[v] = qfull.transpose();
    basis.nscal_[v] = rank;
    basis.nin_[v] = nin;
    scal_moments[v] = (min * qfull).leftCols(rank);
  }
  if (rank_warnings > 0)
    std::cerr << "samplets: reduced scaling block on " << rank_warnings
              << " cluster(s) (rank-deficient moment matrix)\n";

  // Global ordering: root scaling block, then samplets by level, clusters
  // left-to-right within a level (preorder index works since depth filters it).
  basis.root_scaling_count_ = basis.nscal_[0];
  Index off = basis.root_scaling_count_;
  for (Index depth = 0; depth <= tree.depth(); ++depth) {
    for (Index v = 0; v < nn; ++v) {
      if (tree.node(v).depth != depth) continue;
      basis.samplet_offset_[v] = off;
      off += basis.samplet_count(v);
    }
  }

  basis.level_of_.assign(basis.n_, 0);
  basis.owner_node_.assign(basis.n_, 0);
  basis.num_levels_ = tree.depth() + 2;
  basis.level_counts_.assign(basis.num_levels_, 0);
  basis.level_counts_[0] = basis.root_scaling_count_;
  for (Index v = 0; v < nn; ++v) {
    const Index level = tree.node(v).depth + 1;
    for (Index g = basis.samplet_offset_[v]; g < basis.samplet_offset_[v] + basis.samplet_count(v);
         ++g) {
      basis.level_of_[g] = level;
      basis.owner_node_[g] = v;
      ++basis.level_counts_[level];
    }
  }
  return basis;
}

namespace {

// Upward pass for a block of column vectors: returns the scaling rows, writes
// samplet rows into out at this node's global offsets.
Matrix upward(const SampletBasis& b, const ClusterTree& tree, Index v, const Matrix& in,
              Matrix& out, bool parallel) {
  const ClusterNode& nd = tree.node(v);
  Matrix x;
  if (nd.is_leaf()) {
    x = in.middleRows(nd.begin, nd.size());
  } else {
    Matrix xl, xr;
    if (parallel && nd.size() > 8192) {
#pragma omp task shared(xl, b, tree, in, out)
      xl = upward(b, tree, nd.child[0], in, out, parallel);
      xr = upward(b, tree, nd.child[1], in, out, parallel);
#pragma omp taskwait
    } else {
      xl = upward(b, tree, nd.child[0], in, out, false);
      xr = upward(b, tree, nd.child[1], in, out, false);
    }
    x.resize(xl.rows() + xr.rows(), in.cols());
    x.topRows(xl.rows()) = xl;
    x.bottomRows(xr.rows()) = xr;
  }
  Matrix y = b.block(v) * x;
  const Index ns = b.scaling_count(v);
  if (y.rows() > ns) out.middleRows(b.samplet_offset(v), y.rows() - ns) = y.bottomRows(y.rows() - ns);
  if (v == 0) out.topRows(ns) = y.topRows(ns);
  return y.topRows(ns);
}

// Downward pass: reconstructs point values from scaling + samplet coefficients.
void downward(const SampletBasis& b, const ClusterTree& tree, Index v, const Matrix& scal,
              const Matrix& in, Matrix& out, bool parallel) {
  const ClusterNode& nd = tree.node(v);
  const Index ns = b.scaling_count(v);
  const Index nsmp = b.samplet_count(v);
  Matrix y(b.incoming_count(v), in.cols());
  y.topRows(ns) = scal;
  if (nsmp > 0) y.bottomRows(nsmp) = in.middleRows(b.samplet_offset(v), nsmp);
  Matrix x = b.block(v).transpose() * y;
  if (nd.is_leaf()) {
    out.middleRows(nd.begin, nd.size()) = x;
    return;
  }
  const Index nsl = b.scaling_count(nd.child[0]);
  if (parallel && nd.size() > 8192) {
    Matrix xl = x.topRows(nsl), xr = x.bottomRows(x.rows() - nsl);
#pragma omp task shared(b, tree, in, out) firstprivate(xl)
    downward(b, tree, nd.child[0], xl, in, out, parallel);
    downward(b, tree, nd.child[1], xr, in, out, parallel);
#pragma omp taskwait
  } else {
    downward(b, tree, nd.child[0], x.topRows(nsl), in, out, false);
    downward(b, tree, nd.child[1], x.bottomRows(x.rows() - nsl), in, out, false);
  }
}

}  // namespace

Matrix SampletBasis::forward_permuted_cols(const Matrix& m, bool parallel) const {
  if (m.rows() != n_) throw DataError("samplet transform: length mismatch");
  Matrix out(m.rows(), m.cols());
  if (parallel) {
#pragma omp parallel
#pragma omp single
    upward(*this, *tree_, 0, m, out, true);
  } else {
    upward(*this, *tree_, 0, m, out, false);
  }
  return out;
}

Vector SampletBasis::forward(const Vector& v, bool parallel) const {
  if (v.size() != n_) throw DataError("samplet transform: length mismatch");
  const auto& perm = tree_->permutation();
  Matrix vp(n_, 1);
  for (Index i = 0; i < n_; ++i) vp(i, 0) = v[perm.to_original[i]];
  return forward_permuted_cols(vp, parallel).col(0);
}

Vector SampletBasis::inverse(const Vector& w, bool parallel) const {
  if (w.size() != n_) throw DataError("samplet transform: length mismatch");
  Matrix win(n_, 1);
  win.col(0) = w;
  Matrix out(n_, 1);
  const Matrix scal = win.topRows(root_scaling_count_);
  if (parallel) {
#pragma omp parallel
#pragma omp single
    downward(*this, *tree_, 0, scal, win, out, true);
  } else {
    downward(*this, *tree_, 0, scal, win, out, false);
  }
  const auto& perm = tree_->permutation();
  Vector v(n_);
  for (Index i = 0; i < n_; ++i) v[perm.to_original[i]] = out(i, 0);
  return v;
}

Matrix SampletBasis::dense_transform() const {
  // One blocked pass over the permuted identity instead of N vector passes.
  const auto& perm = tree_->permutation();
  Matrix p = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i) p(i, perm.to_original[i]) = 1.0;
  return forward_permuted_cols(p);
}

Index SampletBasis::transform_operation_count() const {
  Index ops = n_;  // permutation pass
  for (Index v = 0; v < tree_->node_count(); ++v) ops += nin_[v] * nin_[v];
  return ops;
}

CoefficientVector forward_transform(const SampletBasis& basis, const CoefficientVector& v) {
  if (v.basis != CoeffBasis::Dirac)
    throw UsageError("forward_transform expects a Dirac-basis vector");
  return {basis.forward(v.values), CoeffBasis::Samplet};
}

CoefficientVector inverse_transform(const SampletBasis& basis, const CoefficientVector& w) {
  if (w.basis != CoeffBasis::Samplet)
    throw UsageError("inverse_transform expects a samplet-basis vector");
  return {basis.inverse(w.values), CoeffBasis::Dirac};
}

}  // namespace mska
