#include "mska/online_svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace mska {

namespace {
constexpr Scalar kOrthoTol = 1e-8;
}

bool OnlineSVD::tracks(Index global_index) const { return ledger_position(global_index) >= 0; }

Index OnlineSVD::ledger_position(Index global_index) const {
  if (global_index < 0 || global_index >= static_cast<Index>(position_.size())) return -1;
  return position_[global_index];
}

void OnlineSVD::append_columns(const Matrix& block, const std::vector<Index>& global_indices) {
  if (block.cols() != static_cast<Index>(global_indices.size()))
    throw UsageError("online SVD append: index count mismatch");
  if (block.cols() == 0) return;
  for (Index g : global_indices)
    if (tracks(g)) throw UsageError("online SVD append: column already tracked");

  const Index p = block.cols();
  if (empty()) {
    Eigen::BDCSVD<Matrix> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    s_ = svd.singularValues();
    v_ = svd.matrixV();
  } else {
    if (block.rows() != u_.rows()) throw UsageError("online SVD append: row count mismatch");
    const Index l = rank();
    // Expansion coefficients with one re-orthogonalization pass.
    Matrix c = u_.transpose() * block;
    Matrix resid = block - u_ * c;
    const Matrix c2 = u_.transpose() * resid;
    c += c2;
    resid -= u_ * c2;

    Eigen::HouseholderQR<Matrix> qr(resid);
    const Matrix q = qr.householderQ() * Matrix::Identity(resid.rows(), p);
    Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

    Matrix core = Matrix::Zero(l + p, l + p);
    core.topLeftCorner(l, l) = s_.asDiagonal();
    core.topRightCorner(l, p) = c;
    core.bottomRightCorner(p, p) = r;

    Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix uu(u_.rows(), l + p);
    uu.leftCols(l) = u_;
    uu.rightCols(p) = q;
    u_ = uu * svd.matrixU();
    s_ = svd.singularValues();
    Matrix vv = Matrix::Zero(tracked() + p, l + p);
    vv.topLeftCorner(tracked(), l) = v_;
    vv.bottomRightCorner(p, p).setIdentity();
    v_ = vv * svd.matrixV();
  }

  for (Index g : global_indices) {
    if (g >= static_cast<Index>(position_.size())) position_.resize(g + 1, -1);
    position_[g] = static_cast<Index>(ledger_.size());
    ledger_.push_back(g);
  }

  if (orthogonality_error() > kOrthoTol) reorthogonalize();
}

void OnlineSVD::reorthogonalize() {
  Eigen::HouseholderQR<Matrix> qr(u_);
  const Index l = rank();
  const Matrix q = qr.householderQ() * Matrix::Identity(u_.rows(), l);
  const Matrix r = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<Matrix> svd(r * Matrix(s_.asDiagonal()),
                            Eigen::ComputeFullU | Eigen::ComputeFullV);
  u_ = q * svd.matrixU();
  s_ = svd.singularValues();
  v_ = v_ * svd.matrixV();
}

Matrix OnlineSVD::reconstruct() const {
  if (empty()) return Matrix(0, 0);
  return u_ * s_.asDiagonal() * v_.transpose();
}

Scalar OnlineSVD::orthogonality_error() const {
  if (empty()) return 0;
  return (u_.transpose() * u_ - Matrix::Identity(rank(), rank())).norm();
}

}  // namespace mska
