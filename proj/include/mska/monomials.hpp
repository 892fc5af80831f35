#pragma once

#include <vector>

#include "mska/types.hpp"

namespace mska {

Scalar binomial(Index n, Index k);

/// Exponent tuples of all monomials of total degree <= q in d variables,
/// graded lexicographic order. Count is C(q+d, d).
std::vector<std::vector<int>> monomial_exponents(Index q, Index d);

/// Moment matrix of Dirac measures located at the given points: entry (a, i)
/// is the monomial x^a evaluated at (points(i,:) - center) / scale.
/// Shape m x n with m = number of exponent tuples, n = number of points.
Matrix monomial_moments(const Eigen::Ref<const Matrix>& points, const Vector& center,
                        const Vector& scale, const std::vector<std::vector<int>>& exps);

/// Change-of-frame matrix S with moments_parent = S * moments_child for
/// monomials centered/scaled per cluster. Both frames share the exponent set.
Matrix monomial_shift_matrix(const std::vector<std::vector<int>>& exps, const Vector& c_child,
                             const Vector& s_child, const Vector& c_parent,
                             const Vector& s_parent);

}  // namespace mska
