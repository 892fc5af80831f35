#include "mska/monomials.hpp"

#include <cmath>

namespace mska {

Scalar binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  Scalar r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * Scalar(n - k + i) / Scalar(i);
  return r;
}

namespace {

void compositions(Index total, Index d, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (d == 1) {
    cur.push_back(static_cast<int>(total));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (Index first = total; first >= 0; --first) {
    cur.push_back(static_cast<int>(first));
    compositions(total - first, d - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(Index q, Index d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  for (Index t = 0; t <= q; ++t) compositions(t, d, cur, out);
  return out;
}

Matrix monomial_moments(const Eigen::Ref<const Matrix>& points, const Vector& center,
                        const Vector& scale, const std::vector<std::vector<int>>& exps) {
  const Index n = points.rows();
  const Index d = points.cols();
  const Index m = static_cast<Index>(exps.size());
  // Local coordinates, then per-axis power tables up to the maximum exponent.
  int qmax = 0;
  for (const auto& e : exps)
    for (int ek : e) qmax = std::max(qmax, ek);
  Matrix local(n, d);
  for (Index k = 0; k < d; ++k)
    local.col(k) = (points.col(k).array() - center[k]) / scale[k];

  std::vector<Matrix> pow(d, Matrix(n, qmax + 1));
  for (Index k = 0; k < d; ++k) {
    pow[k].col(0).setOnes();
    for (int p = 1; p <= qmax; ++p)
      pow[k].col(p) = pow[k].col(p - 1).cwiseProduct(local.col(k));
  }

  Matrix M(m, n);
  for (Index a = 0; a < m; ++a) {
    Vector row = Vector::Ones(n);
    for (Index k = 0; k < d; ++k)
      if (exps[a][k] > 0) row = row.cwiseProduct(pow[k].col(exps[a][k]));
    M.row(a) = row.transpose();
  }
  return M;
}

Matrix monomial_shift_matrix(const std::vector<std::vector<int>>& exps, const Vector& c_child,
                             const Vector& s_child, const Vector& c_parent,
                             const Vector& s_parent) {
  const Index m = static_cast<Index>(exps.size());
  const Index d = c_child.size();
  Vector a(d), b(d);
  for (Index k = 0; k < d; ++k) {
    a[k] = s_child[k] / s_parent[k];
    b[k] = (c_child[k] - c_parent[k]) / s_parent[k];
  }
  Matrix S = Matrix::Zero(m, m);
  for (Index bi = 0; bi < m; ++bi) {
    for (Index ai = 0; ai < m; ++ai) {
      Scalar v = 1.0;
      bool ok = true;
      for (Index k = 0; k < d && ok; ++k) {
        const int be = exps[bi][k], ae = exps[ai][k];
        if (ae > be) {
          ok = false;
          break;
        }
        v *= binomial(be, ae) * std::pow(a[k], ae) * std::pow(b[k], be - ae);
      }
      if (ok) S(bi, ai) = v;
    }
  }
  return S;
}

}  // namespace mska
