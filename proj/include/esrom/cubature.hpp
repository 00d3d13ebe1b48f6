#pragma once

#include "esrom/operators.hpp"
#include "esrom/types.hpp"

#include <string>
#include <vector>

namespace esrom {

enum class RuleKind { volume, stabilizing_merged, viscous, boundary };

struct CubatureRule {
  std::vector<Index> indices;  // into the target's rows (grid points, interfaces, ...)
  Vector weights;              // componentwise >= 0
  RuleKind kind = RuleKind::volume;
  double residual_achieved = 0.0;
  double constraint_residual = 0.0;  // boundary rules only
  int stabilization_rounds = 0;      // stabilizing-merged rules only
};

/// Pairwise Hadamard products of the columns of v (symmetry-distinct), SVD
/// truncated to the smallest k with energy residual E_k <= tol.
DenseMatrix target_space(const DenseMatrix& v, double tol);

/// Products without the dimensional reduction (stabilizing-point targets).
DenseMatrix hadamard_products(const DenseMatrix& v);

struct GreedyOptions {
  bool argmin = false;      // flip the selection rule of Algorithm 1 step 5
  Index max_points = -1;    // default: all rows
  bool best_effort = false; // return the partial rule instead of throwing on exhaustion
};

/// Greedy empirical cubature: select rows of v_target and nonnegative weights
/// with ||v_target(I,:)^T w - v_target^T w_target|| / ||b|| <= tol.
CubatureRule empirical_cubature(const DenseMatrix& v_target, const Vector& w_target,
                                double tol, const GreedyOptions& opts = {});

/// Add stabilizing points until every per-direction test mass matrix
/// v_t(I,:)^T W v_t(I,:) has condition number <= cond_threshold (at most two
/// augmentation rounds; a warning string is emitted if still above).
CubatureRule stabilizing_points(const std::vector<DenseMatrix>& test_bases,
                                const CubatureRule& rule, const DenseMatrix& v_target,
                                const Vector& w_target, double cond_threshold,
                                double alpha_z, double tol,
                                std::string* warning = nullptr);

/// Hyper-reduction of the stacked interface difference operator: indices refer
/// to rows of apply_d (cell interfaces), not grid points.
CubatureRule viscous_points(const FomOperators& ops, const DenseMatrix& v, double tol);

/// Boundary indices and nonnegative weights approximating the boundary Gram of
/// v_b while satisfying, per direction i, the equality constraints
///   v_bt_i(I_b,:)^T diag(n_i) w_b = v_t_i^T (Q_i^T 1)
/// to 5e-8 per component. v_bt holds each direction's test basis at all
/// boundary points; rhs holds the per-direction constraint targets.
CubatureRule boundary_weights(const std::vector<DenseMatrix>& v_bt,
                              const std::vector<BoundaryPoint>& bpoints,
                              const std::vector<Vector>& rhs, const DenseMatrix& v_b,
                              double dx, double tol);

/// max eigenvalue / min eigenvalue of the test mass matrix for one rule.
double test_mass_condition(const DenseMatrix& v_t, const CubatureRule& rule);

}  // namespace esrom
