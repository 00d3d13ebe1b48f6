#include "esrom/operators.hpp"

namespace esrom {

DenseMatrix periodic_diff_matrix(Index k) {
  if (k < 3) throw Error("periodic_diff_matrix: k < 3 degenerates the stencil");
  DenseMatrix q = DenseMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    q(i, (i + 1) % k) = 0.5;
    q(i, (i + k - 1) % k) = -0.5;
  }
  return q;
}

std::pair<DenseMatrix, DenseMatrix> sbp_diff_matrix(Index k) {
  if (k < 3) throw Error("sbp_diff_matrix: k < 3 degenerates the stencil");
  DenseMatrix q = DenseMatrix::Zero(k, k);
  for (Index i = 0; i + 1 < k; ++i) {
    q(i, i + 1) = 0.5;
    q(i + 1, i) = -0.5;
  }
  q(0, 0) = -0.5;
  q(k - 1, k - 1) = 0.5;
  DenseMatrix b = DenseMatrix::Zero(k, k);
  b(0, 0) = -1.0;
  b(k - 1, k - 1) = 1.0;
  return {q, b};
}

std::pair<DenseMatrix, DenseMatrix> diffusion_matrices(Index k, double dx) {
  if (k < 2) throw Error("diffusion_matrices: k < 2");
  if (!(dx > 0)) throw Error("diffusion_matrices: dx must be positive");
  DenseMatrix d = DenseMatrix::Zero(k - 1, k);
  const double s = 1.0 / dx;
  for (Index i = 0; i + 1 < k; ++i) {
    d(i, i) = s;
    d(i, i + 1) = -s;
  }
  DenseMatrix kk = d.transpose() * d;
  return {kk, d};
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DenseMatrix kron_extend_2d(const DenseMatrix& q1d, double dx, int axis) {
  if (q1d.rows() != q1d.cols()) throw Error("kron_extend_2d: q1d not square");
  DenseMatrix id = dx * DenseMatrix::Identity(q1d.rows(), q1d.cols());
  return axis == 1 ? kron(q1d, id) : kron(id, q1d);
}

FomOperators make_fom_operators(Index k, double dx, bool periodic, int dim) {
  FomOperators ops;
  ops.k1 = k;
  ops.dx = dx;
  ops.periodic = periodic;
  ops.dim = dim;
  if (periodic) {
    ops.q1d = periodic_diff_matrix(k);
    ops.b_sbp_diag = Vector::Zero(k);
  } else {
    auto [q, b] = sbp_diff_matrix(k);
    ops.q1d = q;
    ops.b_sbp_diag = b.diagonal();
  }
  auto [kk, d] = diffusion_matrices(k, dx);
  ops.k1d = kk;
  ops.d1d = d;

  if (!periodic) {
    if (dim == 1) {
      ops.boundary = {{0, -1.0, 0.0}, {k - 1, 1.0, 0.0}};
    } else {
      // Four faces, k cells each; corner cells listed once per touching face.
      for (Index iy = 0; iy < k; ++iy) ops.boundary.push_back({0 + iy * k, -1.0, 0.0});
      for (Index iy = 0; iy < k; ++iy) ops.boundary.push_back({(k - 1) + iy * k, 1.0, 0.0});
      for (Index ix = 0; ix < k; ++ix) ops.boundary.push_back({ix + 0 * k, 0.0, -1.0});
      for (Index ix = 0; ix < k; ++ix) ops.boundary.push_back({ix + (k - 1) * k, 0.0, 1.0});
    }
  }
  return ops;
}

DenseMatrix apply_q_dir(const FomOperators& ops, int dir, const DenseMatrix& in) {
  const Index k = ops.k1;
  if (ops.dim == 1) {
    return ops.q1d * in;
  }
  // Grid layout: point p = ix + iy*k; columns reshape to k x k with ix fastest.
  DenseMatrix out(in.rows(), in.cols());
  for (Index c = 0; c < in.cols(); ++c) {
    Eigen::Map<const DenseMatrix> u(in.col(c).data(), k, k);
    Eigen::Map<DenseMatrix> o(out.col(c).data(), k, k);
    if (dir == 0) {
      o = ops.dx * (ops.q1d * u);
    } else {
      o = ops.dx * (u * ops.q1d.transpose());
    }
  }
  return out;
}

Vector qt_one(const FomOperators& ops, int dir) {
  const Index n = ops.n_points();
  Vector out = Vector::Zero(n);
  if (ops.periodic) return out;
  const Index k = ops.k1;
  if (ops.dim == 1) {
    out(0) = -1.0;
    out(k - 1) = 1.0;
    return out;
  }
  // (Q^dir)^T 1 = B^dir 1 with B^dir = B_sbp (x) dx I (dir 0) or dx I (x) B_sbp.
  for (Index iy = 0; iy < k; ++iy) {
    if (dir == 0) {
      out(0 + iy * k) = -ops.dx;
      out((k - 1) + iy * k) = ops.dx;
    } else {
      out(iy + 0 * k) = -ops.dx;
      out(iy + (k - 1) * k) = ops.dx;
    }
  }
  return out;
}

DenseMatrix apply_k(const FomOperators& ops, const DenseMatrix& in) {
  const Index k = ops.k1;
  if (ops.dim == 1) return ops.k1d * in;
  DenseMatrix out(in.rows(), in.cols());
  for (Index c = 0; c < in.cols(); ++c) {
    Eigen::Map<const DenseMatrix> u(in.col(c).data(), k, k);
    Eigen::Map<DenseMatrix> o(out.col(c).data(), k, k);
    o = ops.k1d * u + u * ops.k1d.transpose();
  }
  return out;
}

DenseMatrix apply_d(const FomOperators& ops, const DenseMatrix& in) {
  const Index k = ops.k1;
  if (ops.dim == 1) return ops.d1d * in;
  DenseMatrix out(ops.n_interfaces(), in.cols());
  const Index half = k * (k - 1);
  for (Index c = 0; c < in.cols(); ++c) {
    Eigen::Map<const DenseMatrix> u(in.col(c).data(), k, k);
    // x interfaces: (k-1) x k block, then y interfaces: k x (k-1).
    Eigen::Map<DenseMatrix> ox(out.col(c).data(), k - 1, k);
    ox = ops.d1d * u;
    Eigen::Map<DenseMatrix> oy(out.col(c).data() + half, k, k - 1);
    oy = u * ops.d1d.transpose();
  }
  return out;
}

std::pair<Index, Index> interface_cells(const FomOperators& ops, Index r) {
  const Index k = ops.k1;
  if (ops.dim == 1) return {r, r + 1};
  const Index half = k * (k - 1);
  if (r < half) {  // x interface: column-major over (k-1) x k
    const Index ix = r % (k - 1);
    const Index iy = r / (k - 1);
    return {ix + iy * k, (ix + 1) + iy * k};
  }
  const Index q = r - half;  // y interface: column-major over k x (k-1)
  const Index ix = q % k;
  const Index iy = q / k;
  return {ix + iy * k, ix + (iy + 1) * k};
}

}  // namespace esrom
