#pragma once

#include "esrom/types.hpp"

#include <utility>
#include <vector>

namespace esrom {

/// Periodic skew-symmetric difference matrix, circulant stencil 1/2 (-1, 0, +1).
DenseMatrix periodic_diff_matrix(Index k);

/// Non-periodic SBP pair (Q, B) with Q + Q^T = B = diag(-1, 0, ..., 0, 1).
std::pair<DenseMatrix, DenseMatrix> sbp_diff_matrix(Index k);

/// (K, D): D is the (k-1) x k forward difference scaled 1/dx, K = D^T D.
std::pair<DenseMatrix, DenseMatrix> diffusion_matrices(Index k, double dx);

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// axis 1 -> Q (x) dx*I ; axis 2 -> dx*I (x) Q.
DenseMatrix kron_extend_2d(const DenseMatrix& q1d, double dx, int axis);

/// One boundary evaluation point: grid index plus the outward normal of the
/// face it belongs to. Corner cells appear once per touching face.
struct BoundaryPoint {
  Index grid;
  double nx;
  double ny;
};

struct FomOperators {
  DenseMatrix q1d;     // k1 x k1, periodic or SBP stencil
  DenseMatrix k1d;     // k1 x k1 diffusion, built as D^T D
  DenseMatrix d1d;     // (k1-1) x k1 forward difference / dx
  Vector b_sbp_diag;   // k1, nonzero only at ends (non-periodic)
  double dx = 0.0;
  bool periodic = true;
  int dim = 1;
  Index k1 = 0;  // cells per direction

  Index n_points() const { return dim == 1 ? k1 : k1 * k1; }
  Index n_interfaces() const { return dim == 1 ? k1 - 1 : 2 * k1 * (k1 - 1); }
  std::vector<BoundaryPoint> boundary;  // wall cells; 1D: first and last
};

FomOperators make_fom_operators(Index k, double dx, bool periodic, int dim);

/// Q^dir applied to each column of `in` (grid-point rows). In 2D the operator
/// is the Kronecker extension and carries the dx face weight; in 1D it is the
/// bare stencil matrix.
DenseMatrix apply_q_dir(const FomOperators& ops, int dir, const DenseMatrix& in);

/// (Q^dir)^T 1. Zero for periodic operators; the signed-face vector otherwise.
Vector qt_one(const FomOperators& ops, int dir);

/// Sum over directions of the Laplacian stencil applied to each column.
DenseMatrix apply_k(const FomOperators& ops, const DenseMatrix& in);

/// Stacked interface difference [D^1; D^2 ...] applied to each column:
/// row r is (u_left - u_right)/dx for interface r.
DenseMatrix apply_d(const FomOperators& ops, const DenseMatrix& in);

/// Grid endpoints (left, right cell) of interface row r of apply_d.
std::pair<Index, Index> interface_cells(const FomOperators& ops, Index r);

}  // namespace esrom
