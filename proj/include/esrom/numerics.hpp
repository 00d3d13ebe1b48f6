#pragma once

#include "esrom/types.hpp"

namespace esrom {

struct SvdResult {
  DenseMatrix left_vectors;   // m x r, orthonormal columns
  Vector singular_values;     // r, nonincreasing, r = min(m, n)
  DenseMatrix right_vectors;  // n x r, orthonormal columns
};

/// Thin SVD, A = U diag(s) V^T reconstructed to 1e-12 relative Frobenius error.
SvdResult thin_svd(const DenseMatrix& a);

/// Minimum-norm least-squares solution of A x = b.
Vector lstsq(const DenseMatrix& a, const Vector& b);

/// argmin_{x >= 0} 1/2 || A x - b ||^2, Lawson-Hanson active set.
/// Iteration cap 10 * cols; on cap, throws ConvergenceError carrying the best iterate.
Vector nnls(const DenseMatrix& a, const Vector& b);

/// Solve A X = B for symmetric positive definite A. A nonpositive Cholesky
/// pivot raises SpdError naming the pivot index.
DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b);

/// Lower Cholesky factor of an SPD matrix; SpdError on a nonpositive pivot.
DenseMatrix cholesky(const DenseMatrix& a);

}  // namespace esrom
