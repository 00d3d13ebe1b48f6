#pragma once

#include "esrom/fom.hpp"
#include "esrom/numerics.hpp"
#include "esrom/types.hpp"

namespace esrom {

struct ReducedBasis {
  DenseMatrix v;        // points x modes, orthonormal columns
  Vector spectrum;      // full singular-value spectrum of the snapshot matrix
  double tol = 0.0;     // sqrt(tail energy / total energy) at pod_modes
  Index pod_modes = 0;  // truncation the tol was computed at
  bool enriched = false;
  bool constant_augmented = false;

  Index n_modes() const { return v.cols(); }
};

/// Subsampled snapshot columns, one column per component per kept sample;
/// entropy-variable columns appended when enrich is set.
DenseMatrix assemble_snapshots(const SnapshotSet& snaps, Index stride, bool enrich,
                               const ConservationLaw& law);

ReducedBasis pod(const DenseMatrix& snapshot_matrix, Index n_modes);

/// Prepend the normalized constant vector and re-orthonormalize when 1 is not
/// already in the range of the basis (projection residual > 1e-10).
ReducedBasis ensure_constant_mode(ReducedBasis basis);

}  // namespace esrom
