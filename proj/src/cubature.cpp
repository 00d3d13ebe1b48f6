#include "esrom/cubature.hpp"

#include "esrom/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>

namespace esrom {

DenseMatrix hadamard_products(const DenseMatrix& v) {
  const Index n = v.cols();
  DenseMatrix p(v.rows(), n * (n + 1) / 2);
  Index col = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) p.col(col++) = v.col(i).cwiseProduct(v.col(j));
  return p;
}

namespace {

/// Leading left singular vectors keeping the smallest k with E_k <= tol.
DenseMatrix reduce_by_energy(const DenseMatrix& p, double tol) {
  SvdResult svd = thin_svd(p);
  const Vector& mu = svd.singular_values;
  const double total = mu.squaredNorm();
  double tail = total;
  Index k = 0;
  // E_k = sqrt(sum_{j>k} mu_j^2 / total); find the smallest k with E_k <= tol.
  while (k < mu.size()) {
    tail -= mu[k] * mu[k];
    ++k;
    if (std::sqrt(std::max(tail, 0.0) / total) <= tol) break;
  }
  return svd.left_vectors.leftCols(k);
}

}  // namespace

DenseMatrix target_space(const DenseMatrix& v, double tol) {
  return reduce_by_energy(hadamard_products(v), tol);
}

CubatureRule empirical_cubature(const DenseMatrix& v_target, const Vector& w_target,
                                double tol, const GreedyOptions& opts) {
  if (!(tol > 0.0)) throw Error("empirical_cubature: tol must be positive");
  const Index rows = v_target.rows();
  const Index max_pts = opts.max_points > 0 ? opts.max_points : rows;

  const Vector b = v_target.transpose() * w_target;
  const double bnorm = b.norm();
  Vector row_norm(rows);
  for (Index i = 0; i < rows; ++i) row_norm[i] = v_target.row(i).norm();

  CubatureRule rule;
  rule.kind = RuleKind::volume;
  Vector r = b;
  std::vector<bool> selected(static_cast<size_t>(rows), false);
  Vector w;

  double rel = bnorm > 0 ? 1.0 : 0.0;
  while (rel > tol) {
    // Score each unselected row against the residual direction; ties break to
    // the lowest index for determinism. Zero-norm rows are skipped.
    Vector score = v_target * r / r.norm();
    Index pick = -1;
    double best = 0.0;
    for (Index i = 0; i < rows; ++i) {
      if (selected[static_cast<size_t>(i)] || row_norm[i] == 0.0) continue;
      const double s = score[i] / row_norm[i];
      if (pick < 0 || (opts.argmin ? s < best : s > best)) {
        best = s;
        pick = i;
      }
    }
    if (pick < 0 || static_cast<Index>(rule.indices.size()) >= max_pts) {
      if (opts.best_effort) break;
      throw ConvergenceError(
          "empirical_cubature: rows exhausted at relative residual " + std::to_string(rel),
          w);
    }
    rule.indices.push_back(pick);
    selected[static_cast<size_t>(pick)] = true;

    DenseMatrix a(v_target.cols(), static_cast<Index>(rule.indices.size()));
    for (Index k = 0; k < a.cols(); ++k) a.col(k) = v_target.row(rule.indices[k]).transpose();
    w = Eigen::HouseholderQR<DenseMatrix>(a).solve(b);
    if (w.minCoeff() <= 0.0) w = nnls(a, b);
    r = b - a * w;
    rel = r.norm() / bnorm;
  }
  rule.weights = w.size() ? w : Vector();
  rule.residual_achieved = rel;
  return rule;
}

double test_mass_condition(const DenseMatrix& v_t, const CubatureRule& rule) {
  const Index m = static_cast<Index>(rule.indices.size());
  DenseMatrix vti(m, v_t.cols());
  for (Index k = 0; k < m; ++k) vti.row(k) = v_t.row(rule.indices[k]);
  DenseMatrix mass = vti.transpose() * rule.weights.asDiagonal() * vti;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(mass, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

CubatureRule stabilizing_points(const std::vector<DenseMatrix>& test_bases,
                                const CubatureRule& rule, const DenseMatrix& v_target,
                                const Vector& w_target, double cond_threshold,
                                double alpha_z, double tol, std::string* warning) {
  CubatureRule current = rule;
  const Vector b = v_target.transpose() * w_target;
  const double eig_cut_rel = std::max(1e-10, 1.0 / cond_threshold);

  for (int round = 0; round < 2; ++round) {
    // Gather deficient directions of every per-direction test mass matrix.
    std::vector<Vector> z_cols;
    bool all_ok = true;
    for (const DenseMatrix& vt : test_bases) {
      const Index m = static_cast<Index>(current.indices.size());
      DenseMatrix vti(m, vt.cols());
      for (Index k = 0; k < m; ++k) vti.row(k) = vt.row(current.indices[k]);
      DenseMatrix mass = vti.transpose() * current.weights.asDiagonal() * vti;
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(mass);
      const Vector& ev = es.eigenvalues();
      const double cut = ev.maxCoeff() * eig_cut_rel;
      if (ev.minCoeff() > cut) continue;
      all_ok = false;
      Index added = 0;
      for (Index j = 0; j < ev.size() && added < 10; ++j) {  // ascending order
        if (ev[j] <= cut) {
          z_cols.push_back(vt * es.eigenvectors().col(j));
          ++added;
        }
      }
    }
    if (all_ok) {
      if (round > 0) current.kind = RuleKind::stabilizing_merged;
      return current;
    }

    DenseMatrix z(v_target.rows(), static_cast<Index>(z_cols.size()));
    for (Index j = 0; j < z.cols(); ++j) z.col(j) = z_cols[static_cast<size_t>(j)];
    // No dimensional reduction on the stabilizing target.
    DenseMatrix z_target = hadamard_products(z);
    Vector d = z_target.transpose() * w_target;

    GreedyOptions opts;
    opts.best_effort = true;  // Z_target is not dimension-reduced and may be rank-deficient
    CubatureRule zrule = empirical_cubature(z_target, w_target, tol, opts);

    std::set<Index> merged(current.indices.begin(), current.indices.end());
    merged.insert(zrule.indices.begin(), zrule.indices.end());
    std::vector<Index> idx(merged.begin(), merged.end());

    // Weight re-solve on the alpha_Z-weighted stacked system.
    const double sa = std::sqrt(alpha_z);
    DenseMatrix a(v_target.cols() + z_target.cols(), static_cast<Index>(idx.size()));
    Vector stacked_b(a.rows());
    stacked_b.head(v_target.cols()) = b;
    stacked_b.tail(z_target.cols()) = sa * d;
    for (Index k = 0; k < a.cols(); ++k) {
      a.col(k).head(v_target.cols()) = v_target.row(idx[static_cast<size_t>(k)]).transpose();
      a.col(k).tail(z_target.cols()) =
          sa * z_target.row(idx[static_cast<size_t>(k)]).transpose();
    }
    Vector w = nnls(a, stacked_b);

    // Points whose weight collapsed to zero contribute nothing; keep them out
    // of the rule so the mass matrices stay strictly positive definite.
    CubatureRule next;
    next.kind = RuleKind::stabilizing_merged;
    next.stabilization_rounds = current.stabilization_rounds + 1;
    for (size_t k = 0; k < idx.size(); ++k) {
      if (w[static_cast<Index>(k)] > 0.0) {
        next.indices.push_back(idx[k]);
      }
    }
    next.weights.resize(static_cast<Index>(next.indices.size()));
    Index at = 0;
    for (size_t k = 0; k < idx.size(); ++k) {
      if (w[static_cast<Index>(k)] > 0.0) next.weights[at++] = w[static_cast<Index>(k)];
    }
    DenseMatrix av(v_target.cols(), static_cast<Index>(next.indices.size()));
    for (Index k = 0; k < av.cols(); ++k)
      av.col(k) = v_target.row(next.indices[static_cast<size_t>(k)]).transpose();
    next.residual_achieved = (b - av * next.weights).norm() / b.norm();
    current = next;
  }

  double worst = 0.0;
  for (const DenseMatrix& vt : test_bases)
    worst = std::max(worst, test_mass_condition(vt, current));
  if (worst > cond_threshold && warning) {
    *warning = "test mass condition " + std::to_string(worst) +
               " still above threshold after 2 stabilization rounds";
  }
  return current;
}

CubatureRule viscous_points(const FomOperators& ops, const DenseMatrix& v, double tol) {
  DenseMatrix dv = apply_d(ops, v);
  SvdResult svd = thin_svd(dv);
  Index rank = 0;
  const Vector& s = svd.singular_values;
  if (s.size() > 0) {
    for (Index i = 0; i < s.size(); ++i)
      if (s[i] > s[0] * 1e-10) ++rank;
  }
  CubatureRule rule;
  rule.kind = RuleKind::viscous;
  if (rank == 0) return rule;  // constants only: the viscous term vanishes

  DenseMatrix vd = svd.left_vectors.leftCols(rank);
  DenseMatrix tgt = reduce_by_energy(hadamard_products(vd), tol);
  const double vol = std::pow(ops.dx, ops.dim);
  rule = empirical_cubature(tgt, Vector::Constant(tgt.rows(), vol), tol);
  rule.kind = RuleKind::viscous;
  return rule;
}

CubatureRule boundary_weights(const std::vector<DenseMatrix>& v_bt,
                              const std::vector<BoundaryPoint>& bpoints,
                              const std::vector<Vector>& rhs, const DenseMatrix& v_b,
                              double dx, double tol) {
  const Index nb = static_cast<Index>(bpoints.size());
  const int dims = static_cast<int>(v_bt.size());

  // Constraint matrix: c(p, :) stacks n_i(p) * v_bt_i(p, :) over directions.
  Index mc = 0;
  for (const auto& vt : v_bt) mc += vt.cols();
  DenseMatrix cmat(nb, mc);
  Vector ctarget(mc);
  {
    Index at = 0;
    for (int d = 0; d < dims; ++d) {
      for (Index p = 0; p < nb; ++p) {
        const double n = d == 0 ? bpoints[static_cast<size_t>(p)].nx
                                : bpoints[static_cast<size_t>(p)].ny;
        cmat.block(p, at, 1, v_bt[static_cast<size_t>(d)].cols()) =
            n * v_bt[static_cast<size_t>(d)].row(p);
      }
      ctarget.segment(at, rhs[static_cast<size_t>(d)].size()) = rhs[static_cast<size_t>(d)];
      at += v_bt[static_cast<size_t>(d)].cols();
    }
  }

  // Boundary Gram target for the accuracy part of the objective.
  DenseMatrix gtarget = reduce_by_energy(hadamard_products(v_b), tol);
  const Vector w_target = Vector::Constant(nb, dx);
  const Vector gb = gtarget.transpose() * w_target;

  GreedyOptions gopts;
  gopts.best_effort = true;  // the constraint growth below can add what the Gram pass missed
  CubatureRule seed = empirical_cubature(gtarget, w_target, tol, gopts);

  const double constraint_tol = 5e-8;
  std::vector<Index> idx = seed.indices;
  Vector w;

  auto solve_penalty = [&](const std::vector<Index>& sel, double mu) {
    DenseMatrix a(gtarget.cols() + mc, static_cast<Index>(sel.size()));
    Vector bb(a.rows());
    const double smu = std::sqrt(mu);
    bb.head(gtarget.cols()) = gb;
    bb.tail(mc) = smu * ctarget;
    for (Index k = 0; k < a.cols(); ++k) {
      const Index p = sel[static_cast<size_t>(k)];
      a.col(k).head(gtarget.cols()) = gtarget.row(p).transpose();
      a.col(k).tail(mc) = smu * cmat.row(p).transpose();
    }
    return nnls(a, bb);
  };

  auto constraint_residual = [&](const std::vector<Index>& sel, const Vector& ww) {
    Vector r = -ctarget;
    for (Index k = 0; k < static_cast<Index>(sel.size()); ++k)
      r += ww[k] * cmat.row(sel[static_cast<size_t>(k)]).transpose();
    return r.cwiseAbs().maxCoeff();
  };

  // Penalty continuation; if it stalls, grow the support by the point most
  // aligned with the remaining constraint residual and restart.
  double cres = std::numeric_limits<double>::infinity();
  for (int grow = 0; grow <= 8; ++grow) {
    double mu = 1.0;
    for (int round = 0; round < 16; ++round) {
      w = solve_penalty(idx, mu);
      cres = constraint_residual(idx, w);
      if (cres <= constraint_tol) break;
      mu *= 10.0;
    }
    if (cres <= constraint_tol) break;
    // Grow: score unselected boundary points against the constraint residual.
    Vector r = -ctarget;
    for (Index k = 0; k < static_cast<Index>(idx.size()); ++k)
      r += w[k] * cmat.row(idx[static_cast<size_t>(k)]).transpose();
    std::set<Index> have(idx.begin(), idx.end());
    Index pick = -1;
    double best = 0.0;
    for (Index p = 0; p < nb; ++p) {
      if (have.count(p)) continue;
      const double nrm = cmat.row(p).norm();
      if (nrm == 0.0) continue;
      const double s = std::abs(cmat.row(p).dot(r)) / nrm;
      if (pick < 0 || s > best) {
        best = s;
        pick = p;
      }
    }
    if (pick < 0) break;  // all boundary points used
    idx.push_back(pick);
    std::sort(idx.begin(), idx.end());
  }
  if (cres > constraint_tol) {
    throw Error("boundary_weights: constraint residual " + std::to_string(cres) +
                " above 5e-8 with all candidate points");
  }

  // Polish: exact equality-constrained least squares on the positive support,
  // via the nullspace method. Nonnegativity is re-checked; indices that the
  // polish drives negative are dropped and the solve repeated.
  std::vector<Index> support;
  Vector wsup;
  {
    std::vector<double> wk;
    for (Index k = 0; k < static_cast<Index>(idx.size()); ++k) {
      if (w[k] > 0.0) {
        support.push_back(idx[static_cast<size_t>(k)]);
        wk.push_back(w[k]);
      }
    }
    wsup = Eigen::Map<Vector>(wk.data(), static_cast<Index>(wk.size()));
  }
  for (int attempt = 0; attempt < 6; ++attempt) {
    const Index m = static_cast<Index>(support.size());
    DenseMatrix ce(mc, m);  // constraints: ce w = ctarget
    DenseMatrix ga(gtarget.cols(), m);
    for (Index k = 0; k < m; ++k) {
      ce.col(k) = cmat.row(support[static_cast<size_t>(k)]).transpose();
      ga.col(k) = gtarget.row(support[static_cast<size_t>(k)]).transpose();
    }
    Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(ce);
    Vector w0 = cod.solve(ctarget);  // particular solution
    const Index rank = cod.rank();
    // Nullspace basis of ce from the full SVD.
    Eigen::BDCSVD<DenseMatrix> svd(ce, Eigen::ComputeFullV);
    const Index nullity = m - rank;
    if (nullity > 0) {
      DenseMatrix nbasis = svd.matrixV().rightCols(nullity);
      Vector y = lstsq(ga * nbasis, gb - ga * w0);
      w0 += nbasis * y;
    }
    if ((ce * w0 - ctarget).cwiseAbs().maxCoeff() > constraint_tol) break;
    if (w0.minCoeff() >= 0.0) {
      wsup = w0;
      break;
    }
    std::vector<Index> keep;
    std::vector<double> wk;
    for (Index k = 0; k < m; ++k) {
      if (w0[k] > 0.0) {
        keep.push_back(support[static_cast<size_t>(k)]);
        wk.push_back(w0[k]);
      }
    }
    if (keep.size() == support.size() || keep.empty()) break;
    support = keep;
    wsup = Eigen::Map<Vector>(wk.data(), static_cast<Index>(wk.size()));
  }

  CubatureRule rule;
  rule.kind = RuleKind::boundary;
  rule.indices = support;
  rule.weights = wsup;
  DenseMatrix ga(gtarget.cols(), static_cast<Index>(support.size()));
  for (Index k = 0; k < ga.cols(); ++k)
    ga.col(k) = gtarget.row(support[static_cast<size_t>(k)]).transpose();
  rule.residual_achieved = (gb - ga * wsup).norm() / gb.norm();
  Vector cr = -ctarget;
  for (Index k = 0; k < static_cast<Index>(support.size()); ++k)
    cr += wsup[k] * cmat.row(support[static_cast<size_t>(k)]).transpose();
  rule.constraint_residual = cr.cwiseAbs().maxCoeff();
  if (rule.constraint_residual > constraint_tol) {
    throw Error("boundary_weights: polished constraint residual above 5e-8");
  }
  return rule;
}

}  // namespace esrom
