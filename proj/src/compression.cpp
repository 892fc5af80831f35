#include "mska/compression.hpp"

#include <algorithm>
#include <cmath>

namespace mska {

namespace {

// Working width of dense column slabs, shrunk for large N to bound the
// intermediate dense storage at roughly 2 x 256 MB.
Index slab_width(Index n) {
  const Index by_mem = Index(32'000'000) / std::max<Index>(n, 1);
  return std::clamp<Index>(by_mem, 32, 1024);
}

class BlockAssembler {
 public:
  BlockAssembler(const SampletBasis& row_basis, const KernelModel& model,
                 const SampletBasis* col_basis, const Matrix& col_points, Scalar rho)
      : rb_(row_basis),
        model_(model),
        cb_(col_basis),
        col_points_(col_points),
        rho_(rho),
        slab_(slab_width(row_basis.size())) {}

  // Two-phase run: phase 0 accumulates the Frobenius norm of the kept
  // entries, phase 1 emits triplets at |v| >= threshold.
  Scalar kept_frobenius() {
    fro_sq_ = 0;
    emitting_ = false;
    run();
    return std::sqrt(fro_sq_);
  }

  std::vector<Triplet> emit(Scalar threshold) {
    triplets_.clear();
    threshold_ = threshold;
    emitting_ = true;
    run();
    return std::move(triplets_);
  }

 private:
  void run() {
    if (cb_) {
      rows_buffer_.reserve(rb_.size());
      upward_columns(0);
    } else {
      row_only();
    }
  }

  // Returns the transformed scaling columns of col cluster nu (N x nscal).
  Matrix upward_columns(Index nu) {
    const ClusterNode& nd = cb_->tree().node(nu);
    Matrix x;
    if (nd.size() <= slab_ || nd.is_leaf()) {
      Matrix g = assemble_dense_block(rb_.tree().permuted_points(), model_,
                                      col_points_.middleRows(nd.begin, nd.size()));
      Matrix gs = rb_.forward_permuted_cols(g);
      g.resize(0, 0);
      return upward_subtree(nu, nd.begin, gs);
    }
    const Matrix xl = upward_columns(nd.child[0]);
    const Matrix xr = upward_columns(nd.child[1]);
    x.resize(rb_.size(), xl.cols() + xr.cols());
    x.leftCols(xl.cols()) = xl;
    x.rightCols(xr.cols()) = xr;
    return transform_and_emit(nu, x);
  }

  // Column pass below the slab level; gs holds the row-transformed kernel
  // columns of the slab, indexed relative to slab_begin.
  Matrix upward_subtree(Index nu, Index slab_begin, const Matrix& gs) {
    const ClusterNode& nd = cb_->tree().node(nu);
    Matrix x;
    if (nd.is_leaf()) {
      x = gs.middleCols(nd.begin - slab_begin, nd.size());
    } else {
      const Matrix xl = upward_subtree(nd.child[0], slab_begin, gs);
      const Matrix xr = upward_subtree(nd.child[1], slab_begin, gs);
      x.resize(rb_.size(), xl.cols() + xr.cols());
      x.leftCols(xl.cols()) = xl;
      x.rightCols(xr.cols()) = xr;
    }
    return transform_and_emit(nu, x);
  }

  Matrix transform_and_emit(Index nu, const Matrix& x) {
    Matrix y = x * cb_->block(nu).transpose();
    const Index ns = cb_->scaling_count(nu);
    if (y.cols() > ns)
      emit_block(nu, cb_->samplet_offset(nu), y.rightCols(y.cols() - ns));
    if (nu == 0) emit_block(nu, 0, y.leftCols(ns));  // root scaling distributions
    return y.leftCols(ns);
  }

  // Rows kept for column cluster nu: samplets of every row cluster that is
  // not admissible with nu, pruning admissible subtrees wholesale.
  void kept_rows(Index nu, Index tau, std::vector<Index>& out) const {
    const ClusterNode& rn = rb_.tree().node(tau);
    if (admissible(rn, cb_->tree().node(nu), rho_)) return;
    if (tau == 0)
      for (Index g = 0; g < rb_.root_scaling_count(); ++g) out.push_back(g);
    for (Index g = rb_.samplet_offset(tau); g < rb_.samplet_offset(tau) + rb_.samplet_count(tau);
         ++g)
      out.push_back(g);
    if (!rn.is_leaf()) {
      kept_rows(nu, rn.child[0], out);
      kept_rows(nu, rn.child[1], out);
    }
  }

  void emit_block(Index nu, Index col_offset, const Eigen::Ref<const Matrix>& block) {
    rows_buffer_.clear();
    kept_rows(nu, 0, rows_buffer_);
    std::sort(rows_buffer_.begin(), rows_buffer_.end());
    if (!emitting_) {
      Scalar s = 0;
      for (Index j = 0; j < block.cols(); ++j)
        for (Index r : rows_buffer_) s += block(r, j) * block(r, j);
      fro_sq_ += s;
      return;
    }
    for (Index j = 0; j < block.cols(); ++j)
      for (Index r : rows_buffer_) {
        const Scalar v = block(r, j);
        if (std::abs(v) >= threshold_ && v != Scalar(0))
          triplets_.push_back({r, col_offset + j, v});
      }
  }

  // No column tree: transform rows only and keep every row.
  void row_only() {
    const Index m = col_points_.rows();
    for (Index begin = 0; begin < m; begin += slab_) {
      const Index width = std::min(slab_, m - begin);
      Matrix g = assemble_dense_block(rb_.tree().permuted_points(), model_,
                                      col_points_.middleRows(begin, width));
      Matrix gs = rb_.forward_permuted_cols(g);
      g.resize(0, 0);
      if (!emitting_) {
        fro_sq_ += gs.squaredNorm();
        continue;
      }
      for (Index j = 0; j < width; ++j)
        for (Index r = 0; r < gs.rows(); ++r) {
          const Scalar v = gs(r, j);
          if (std::abs(v) >= threshold_ && v != Scalar(0))
            triplets_.push_back({r, begin + j, v});
        }
    }
  }

  const SampletBasis& rb_;
  const KernelModel& model_;
  const SampletBasis* cb_;
  const Matrix& col_points_;
  Scalar rho_;
  Index slab_;

  bool emitting_ = false;
  Scalar fro_sq_ = 0;
  Scalar threshold_ = 0;
  std::vector<Triplet> triplets_;
  std::vector<Index> rows_buffer_;
};

SparseMatrix assemble_block_compressed(const SampletBasis& row_basis, const KernelModel& model,
                                       const SampletBasis* col_basis, const Matrix& col_points,
                                       const CompressionConfig& cfg) {
  BlockAssembler assembler(row_basis, model, col_basis, col_points, cfg.rho);
  Scalar threshold = 0;
  if (cfg.kappa > 0) threshold = cfg.kappa * assembler.kept_frobenius();
  std::vector<Triplet> triplets = assembler.emit(threshold);
  return SparseMatrix::from_triplets(row_basis.size(), col_points.rows(), std::move(triplets));
}

}  // namespace

SparseMatrix assemble_compressed_square(const SampletBasis& basis, const KernelModel& model,
                                        const CompressionConfig& cfg) {
  return assemble_block_compressed(basis, model, &basis, basis.tree().permuted_points(), cfg);
}

SparseMatrix assemble_compressed_rect(const SampletBasis& row_basis, const KernelDictionary& dict,
                                      const std::vector<const SampletBasis*>& col_bases,
                                      const CompressionConfig& cfg) {
  if (!col_bases.empty() && col_bases.size() != dict.entries.size())
    throw UsageError("assemble_compressed_rect: one column basis slot per dictionary entry");
  std::vector<SparseMatrix> blocks;
  for (std::size_t l = 0; l < dict.entries.size(); ++l) {
    const SampletBasis* cb = col_bases.empty() ? nullptr : col_bases[l];
    const Matrix& pts =
        cb ? cb->tree().permuted_points() : dict.entries[l].centers;
    if (dict.entries[l].centers.cols() != row_basis.tree().dim())
      throw DataError("assemble_compressed_rect: mismatched dimensions");
    blocks.push_back(
        assemble_block_compressed(row_basis, dict.entries[l].model, cb, pts, cfg));
  }
  if (blocks.empty()) return SparseMatrix(row_basis.size(), 0);
  return SparseMatrix::hcat(blocks);
}

}  // namespace mska
