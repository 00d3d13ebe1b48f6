#include "esrom/numerics.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace esrom {

SvdResult thin_svd(const DenseMatrix& a) {
  if (!a.allFinite()) {
    throw Error("thin_svd: non-finite input");
  }
  // BDCSVD falls back to Jacobi internally for small problems.
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Vector lstsq(const DenseMatrix& a, const Vector& b) {
  if (!a.allFinite() || !b.allFinite()) {
    throw Error("lstsq: non-finite input");
  }
  // Complete orthogonal decomposition gives the minimum-norm solution for
  // rank-deficient systems.
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(a);
  return cod.solve(b);
}

namespace {

// Solve the unconstrained least squares restricted to the passive set.
Vector solve_passive(const DenseMatrix& a, const Vector& b,
                     const std::vector<Index>& passive) {
  DenseMatrix ap(a.rows(), static_cast<Index>(passive.size()));
  for (Index k = 0; k < ap.cols(); ++k) ap.col(k) = a.col(passive[k]);
  return Eigen::HouseholderQR<DenseMatrix>(ap).solve(b);
}

}  // namespace

Vector nnls(const DenseMatrix& a, const Vector& b) {
  if (!a.allFinite() || !b.allFinite()) {
    throw Error("nnls: non-finite input");
  }
  const Index n = a.cols();
  Vector x = Vector::Zero(n);
  std::vector<Index> passive;
  std::vector<bool> in_passive(static_cast<size_t>(n), false);

  const double wtol = 1e-12 * std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff());
  const Index max_iter = 10 * n;
  Index iter = 0;

  while (true) {
    Vector w = a.transpose() * (b - a * x);
    Index j = -1;
    double wmax = wtol;
    for (Index i = 0; i < n; ++i) {
      if (!in_passive[static_cast<size_t>(i)] && w[i] > wmax) {
        wmax = w[i];
        j = i;
      }
    }
    if (j < 0) break;  // KKT satisfied
    passive.push_back(j);
    in_passive[static_cast<size_t>(j)] = true;

    while (true) {
      if (++iter > max_iter) {
        throw ConvergenceError("nnls: iteration cap (10*cols) exceeded", x);
      }
      Vector z = solve_passive(a, b, passive);
      double alpha = 2.0;
      for (size_t k = 0; k < passive.size(); ++k) {
        if (z[static_cast<Index>(k)] <= 0.0) {
          const double xi = x[passive[k]];
          const double t = xi / (xi - z[static_cast<Index>(k)]);
          alpha = std::min(alpha, t);
        }
      }
      if (alpha >= 2.0) {  // all passive coefficients feasible
        for (size_t k = 0; k < passive.size(); ++k) x[passive[k]] = z[static_cast<Index>(k)];
        break;
      }
      for (size_t k = 0; k < passive.size(); ++k) {
        const Index i = passive[k];
        x[i] += alpha * (z[static_cast<Index>(k)] - x[i]);
      }
      // Move coefficients pinned at zero back to the active set.
      std::vector<Index> keep;
      for (Index i : passive) {
        if (x[i] > 0.0) {
          keep.push_back(i);
        } else {
          x[i] = 0.0;
          in_passive[static_cast<size_t>(i)] = false;
        }
      }
      passive = std::move(keep);
      if (passive.empty()) break;
    }
  }
  return x;
}

DenseMatrix cholesky(const DenseMatrix& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw Error("cholesky: matrix not square");
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
    throw Error("cholesky: matrix not symmetric to 1e-12");
  }
  DenseMatrix l = DenseMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (d <= 0.0) {
      throw SpdError("matrix not positive definite: nonpositive pivot at index " +
                         std::to_string(j),
                     j);
    }
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return l;
}

DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix l = cholesky(a);
  DenseMatrix y = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

}  // namespace esrom
