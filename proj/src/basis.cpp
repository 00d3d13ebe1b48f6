#include "esrom/basis.hpp"

#include <Eigen/QR>

#include <cmath>

namespace esrom {

DenseMatrix assemble_snapshots(const SnapshotSet& snaps, Index stride, bool enrich,
                               const ConservationLaw& law) {
  if (stride < 1) throw Error("assemble_snapshots: stride must be >= 1");
  const Index total = snaps.states.cols();
  std::vector<Index> keep;
  for (Index j = 0; j < total; j += stride) keep.push_back(j);
  if (keep.empty()) throw Error("assemble_snapshots: empty selection");

  const Index pts = snaps.points();
  const int n = snaps.n_comp;
  const Index cols_per = static_cast<Index>(keep.size()) * n;
  DenseMatrix m(pts, enrich ? 2 * cols_per : cols_per);
  Index col = 0;
  for (Index j : keep) {
    StateField f = snaps.field(j);
    for (int c = 0; c < n; ++c) m.col(col++) = f.col(c);
  }
  if (enrich) {
    for (Index j : keep) {
      StateField f = snaps.field(j);
      StateField v(pts, n);
      for (Index i = 0; i < pts; ++i) {
        v.row(i) = law.entropy_variables(row_state(f, i)).transpose();
      }
      for (int c = 0; c < n; ++c) m.col(col++) = v.col(c);
    }
  }
  return m;
}

ReducedBasis pod(const DenseMatrix& snapshot_matrix, Index n_modes) {
  SvdResult svd = thin_svd(snapshot_matrix);
  const Index rank_bound = svd.singular_values.size();
  Index rank = 0;
  for (Index i = 0; i < rank_bound; ++i) {
    if (svd.singular_values[i] > svd.singular_values[0] * 1e-14) ++rank;
  }
  if (n_modes < 1 || n_modes > rank) {
    throw Error("pod: requested " + std::to_string(n_modes) + " modes, rank is " +
                std::to_string(rank));
  }
  ReducedBasis b;
  b.v = svd.left_vectors.leftCols(n_modes);
  b.spectrum = svd.singular_values;
  b.pod_modes = n_modes;
  const double total = b.spectrum.squaredNorm();
  const double tail = b.spectrum.tail(rank_bound - n_modes).squaredNorm();
  b.tol = std::sqrt(tail / total);
  return b;
}

ReducedBasis ensure_constant_mode(ReducedBasis basis) {
  const Index k = basis.v.rows();
  Vector one = Vector::Constant(k, 1.0 / std::sqrt(static_cast<double>(k)));
  Vector resid = one - basis.v * (basis.v.transpose() * one);
  if (resid.norm() <= 1e-10) return basis;

  DenseMatrix aug(k, basis.v.cols() + 1);
  aug.col(0) = one;
  aug.rightCols(basis.v.cols()) = basis.v;
  Eigen::HouseholderQR<DenseMatrix> qr(aug);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(k, aug.cols());
  // Fix column signs so the result is reproducible across runs.
  DenseMatrix r = qr.matrixQR().topRows(aug.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  basis.v = q;
  basis.constant_augmented = true;
  return basis;
}

}  // namespace esrom
