#include "esrom/rom.hpp"

#include "esrom/numerics.hpp"

#include <cmath>

namespace esrom {

DenseMatrix build_test_basis(const DenseMatrix& v, const FomOperators& ops, int dir) {
  const Index k = v.rows();
  DenseMatrix cat(k, 1 + 2 * v.cols());
  cat.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
  cat.middleCols(1, v.cols()) = v;
  cat.rightCols(v.cols()) = apply_q_dir(ops, dir, v);
  SvdResult svd = thin_svd(cat);
  Index rank = 0;
  for (Index i = 0; i < svd.singular_values.size(); ++i) {
    if (svd.singular_values[i] > svd.singular_values[0] * 1e-10) ++rank;
  }
  return svd.left_vectors.leftCols(rank);
}

DenseMatrix projection_matrix(const DenseMatrix& vt_rows, const Vector& w) {
  DenseMatrix vtw = vt_rows.transpose() * w.asDiagonal();  // dim_t x Ns
  DenseMatrix mass = vtw * vt_rows;
  try {
    return solve_spd(mass, vtw);
  } catch (const SpdError& e) {
    throw SpdError(std::string("test mass matrix is singular (") + e.what() +
                       "); add stabilizing points",
                   e.pivot);
  }
}

DenseMatrix hyper_reduced_diff(const DenseMatrix& q_hat, const DenseMatrix& p_t,
                               bool enforce_skew) {
  DenseMatrix q = p_t.transpose() * q_hat * p_t;
  if (enforce_skew) {
    DenseMatrix skew = 0.5 * (q - q.transpose());
    return skew;
  }
  return q;
}

DenseMatrix hybridized_sbp(const DenseMatrix& q_t, const DenseMatrix& e,
                           const Vector& b_diag) {
  const Index ns = q_t.rows();
  const Index nb = b_diag.size();
  DenseMatrix qh = DenseMatrix::Zero(ns + nb, ns + nb);
  for (Index i = 0; i < ns; ++i) {
    for (Index j = i + 1; j < ns; ++j) {
      const double t = 0.5 * (q_t(i, j) - q_t(j, i));
      qh(i, j) = t;
      qh(j, i) = -t;
    }
  }
  for (Index b = 0; b < nb; ++b) {
    for (Index j = 0; j < ns; ++j) {
      const double t = 0.5 * b_diag[b] * e(b, j);
      qh(j, ns + b) = t;
      qh(ns + b, j) = -t;
    }
    qh(ns + b, ns + b) = 0.5 * b_diag[b];
  }
  return qh;
}

namespace {

DenseMatrix select_rows(const DenseMatrix& m, const std::vector<Index>& idx) {
  DenseMatrix out(static_cast<Index>(idx.size()), m.cols());
  for (Index k = 0; k < out.rows(); ++k) out.row(k) = m.row(idx[static_cast<size_t>(k)]);
  return out;
}

}  // namespace

RomOperators build_rom_operators(const ReducedBasis& basis, const FomOperators& ops,
                                 const CubatureRule& volume_rule,
                                 const CubatureRule* viscous_rule,
                                 const CubatureRule* boundary_rule) {
  RomOperators rom;
  rom.dim = ops.dim;
  rom.dx = ops.dx;
  rom.n_modes = basis.n_modes();
  rom.wall = !ops.periodic;
  rom.vol_idx = volume_rule.indices;
  rom.w_vol = volume_rule.weights;
  rom.v_vol = select_rows(basis.v, rom.vol_idx);

  // Boundary evaluation set. 1D walls keep both endpoints with unit weight
  // (B_sbp = diag(-1, 1)); in 2D the points and weights come from the
  // constrained boundary rule.
  std::vector<Index> bsel;
  if (rom.wall) {
    if (ops.dim == 1) {
      bsel = {0, 1};
      rom.w_bnd = Vector::Ones(2);
    } else {
      if (!boundary_rule) throw Error("build_rom_operators: 2D wall needs a boundary rule");
      bsel = boundary_rule->indices;
      rom.w_bnd = boundary_rule->weights;
    }
    for (Index s : bsel) {
      const BoundaryPoint& bp = ops.boundary[static_cast<size_t>(s)];
      rom.bnd_idx.push_back(bp.grid);
      rom.bnd_nx.push_back(bp.nx);
      rom.bnd_ny.push_back(bp.ny);
    }
    rom.v_b = select_rows(basis.v, rom.bnd_idx);
  }

  for (int d = 0; d < ops.dim; ++d) {
    DenseMatrix vt = build_test_basis(basis.v, ops, d);
    DenseMatrix qvt = apply_q_dir(ops, d, vt);
    DenseMatrix qhat = vt.transpose() * qvt;
    if (ops.periodic) qhat = 0.5 * (qhat - qhat.transpose());
    DenseMatrix vt_rows = select_rows(vt, rom.vol_idx);
    DenseMatrix pt = projection_matrix(vt_rows, rom.w_vol);
    DenseMatrix qt = hyper_reduced_diff(qhat, pt, ops.periodic);

    rom.v_t.push_back(vt);
    rom.q_hat_t.push_back(std::move(qhat));
    rom.p_t.push_back(pt);
    rom.q_t.push_back(qt);

    if (rom.wall) {
      Vector b(static_cast<Index>(rom.bnd_idx.size()));
      for (Index p = 0; p < b.size(); ++p) {
        const double n =
            d == 0 ? rom.bnd_nx[static_cast<size_t>(p)] : rom.bnd_ny[static_cast<size_t>(p)];
        b[p] = n * rom.w_bnd[p];
      }
      DenseMatrix vbt = select_rows(vt, rom.bnd_idx);
      DenseMatrix e = vbt * pt;
      rom.q_h.push_back(hybridized_sbp(qt, e, b));
      rom.e_mat.push_back(std::move(e));
      rom.b_diag.push_back(std::move(b));
    }
  }

  rom.m_n = rom.v_vol.transpose() * rom.w_vol.asDiagonal() * rom.v_vol;
  solve_spd(rom.m_n, DenseMatrix::Identity(rom.m_n.rows(), rom.m_n.cols()));  // SPD check
  rom.m_n_llt.compute(rom.m_n);
  rom.p = solve_spd(rom.m_n, rom.v_vol.transpose() * rom.w_vol.asDiagonal());

  if (viscous_rule && !viscous_rule->indices.empty()) {
    DenseMatrix dv = apply_d(ops, basis.v);
    rom.visc.dv = select_rows(dv, viscous_rule->indices);
    rom.visc.w = viscous_rule->weights;
    for (Index r : viscous_rule->indices) {
      auto [l, rgt] = interface_cells(ops, r);
      rom.visc.left.push_back(l);
      rom.visc.right.push_back(rgt);
    }
    rom.visc.v_left = select_rows(basis.v, rom.visc.left);
    rom.visc.v_right = select_rows(basis.v, rom.visc.right);
  }
  rom.visc.vkv = basis.v.transpose() * apply_k(ops, basis.v);
  return rom;
}

EntropyProjection entropy_project(const DenseMatrix& u_n, const RomOperators& rom,
                                  const ConservationLaw& law) {
  EntropyProjection ep;
  ep.u_vol = rom.v_vol * u_n;
  const Index ns = rom.ns();
  const Index nb = rom.nb();
  const int n = law.n_components();

  DenseMatrix v_vol_vars(ns, n);
  for (Index i = 0; i < ns; ++i) {
    try {
      v_vol_vars.row(i) = law.entropy_variables(row_state(ep.u_vol, i)).transpose();
    } catch (const PositivityError& e) {
      throw PositivityError(std::string(e.what()) + " at volume point " + std::to_string(i),
                            i, e.quantity);
    }
  }
  ep.v_n = rom.p * v_vol_vars;

  ep.v_tilde.resize(ns + nb, n);
  ep.v_tilde.topRows(ns) = rom.v_vol * ep.v_n;
  if (nb > 0) ep.v_tilde.bottomRows(nb) = rom.v_b * ep.v_n;

  ep.u_tilde.resize(ns + nb, n);
  for (Index i = 0; i < ns + nb; ++i) {
    try {
      ep.u_tilde.row(i) =
          law.conservative_from_entropy(row_state(ep.v_tilde, i)).transpose();
    } catch (const PositivityError& e) {
      throw PositivityError(std::string(e.what()) + " at entropy-projected point " +
                                std::to_string(i),
                            i, e.quantity);
    }
  }
  return ep;
}

DenseMatrix viscous_rhs(ViscMode mode, const EntropyProjection& ep,
                        const RomOperators& rom, const ConservationLaw& law,
                        double epsilon, double* dissipation) {
  const int n = law.n_components();
  const Index nm = rom.n_modes;
  DenseMatrix d = DenseMatrix::Zero(nm, n);
  if (dissipation) *dissipation = 0.0;
  if (mode == ViscMode::none || epsilon == 0.0) return d;

  if (mode == ViscMode::v3) {
    // eps dx^dim V^T K V P u_tilde
    DenseMatrix put = rom.p * ep.u_tilde.topRows(rom.ns());
    d = epsilon * std::pow(rom.dx, rom.dim) * (rom.visc.vkv * put);
  } else {
    const Index m = static_cast<Index>(rom.visc.left.size());
    if (m == 0) return d;
    const double inv_dx = 1.0 / rom.dx;
    DenseMatrix vl = rom.visc.v_left * ep.v_n;   // v_tilde at left endpoints
    DenseMatrix vr = rom.visc.v_right * ep.v_n;  // and right endpoints
    for (Index i = 0; i < m; ++i) {
      State dvec(n);
      if (mode == ViscMode::v1) {
        // (D u_tilde)_i with u_tilde the map of grid values of V v_N
        State ul = law.conservative_from_entropy(row_state(vl, i));
        State ur = law.conservative_from_entropy(row_state(vr, i));
        dvec = (ul - ur) * inv_dx;
      } else {
        // H (D V v_N)_i with H = du/dv at the averaged entropy-projected state
        State ul = law.conservative_from_entropy(row_state(vl, i));
        State ur = law.conservative_from_entropy(row_state(vr, i));
        State ubar = 0.5 * (ul + ur);
        DenseMatrix h = law.jacobian_dudv(ubar);
        State dvn(n);
        for (int c = 0; c < n; ++c) dvn[c] = rom.visc.dv.row(i).dot(ep.v_n.col(c));
        dvec = h * dvn;
      }
      // Accumulate eps * w_i * (V(l,:) - V(r,:))^T (x) dvec / dx
      const double s = epsilon * rom.visc.w[i] * inv_dx;
      for (int c = 0; c < n; ++c) {
        d.col(c) += s * dvec[c] *
                    (rom.visc.v_left.row(i) - rom.visc.v_right.row(i)).transpose();
      }
    }
  }
  if (dissipation) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) acc += ep.v_n.col(c).dot(d.col(c));
    *dissipation = acc;
  }
  return d;
}

DenseMatrix rom_rhs(const DenseMatrix& u_n, const RomOperators& rom,
                    const ConservationLaw& law, const RomConfig& cfg,
                    RomRhsDiag* diag) {
  EntropyProjection ep = entropy_project(u_n, rom, law);
  const Index ns = rom.ns();
  const Index nb = rom.nb();
  const Index ne = ns + nb;
  const int n = law.n_components();
  const int dims = rom.dim;

  const std::vector<DenseMatrix>& a = rom.wall ? rom.q_h : rom.q_t;

  // Flux-differencing accumulator over all evaluation points, summed over
  // directions: acc_i = sum_d (2 A_d o F_d) 1 |_i.
  DenseMatrix acc = DenseMatrix::Zero(ne, n);
  State fs[2];
  std::vector<State> rows(static_cast<size_t>(ne), State(n));
  for (Index i = 0; i < ne; ++i) rows[static_cast<size_t>(i)] = row_state(ep.u_tilde, i);

  for (Index i = 0; i < ne; ++i) {
    for (Index j = i + 1; j < ne; ++j) {
      law.ec_flux(rows[static_cast<size_t>(i)], rows[static_cast<size_t>(j)], fs);
      for (int dmat = 0; dmat < dims; ++dmat) {
        const double t = 2.0 * a[static_cast<size_t>(dmat)](i, j);
        if (t == 0.0) continue;
        acc.row(i) += t * fs[dmat].transpose();
        acc.row(j) -= t * fs[dmat].transpose();
      }
    }
  }
  if (rom.wall) {
    // Diagonal of Q_h: the boundary block, F_ii = f(u_i) by flux consistency.
    State fa[2];
    for (Index b = 0; b < nb; ++b) {
      law.flux(rows[static_cast<size_t>(ns + b)], fa);
      for (int dmat = 0; dmat < dims; ++dmat) {
        acc.row(ns + b) += rom.b_diag[static_cast<size_t>(dmat)][b] * fa[dmat].transpose();
      }
    }
  }

  if (diag) {
    double ce = 0.0, cs = 0.0;
    for (Index i = 0; i < ne; ++i) {
      const double c = ep.v_tilde.row(i).dot(acc.row(i));
      ce += c;
      cs += std::abs(c);
    }
    diag->convective_entropy = ce;
    diag->convective_scale = cs;
  }

  DenseMatrix rhs = DenseMatrix::Zero(rom.n_modes, n);
  rhs += rom.v_vol.transpose() * acc.topRows(ns);
  if (nb > 0) rhs += rom.v_b.transpose() * acc.bottomRows(nb);

  // Weak boundary conditions: V_b^T B^i (f_i* - f_i(u_b)).
  if (rom.wall) {
    State fa[2];
    for (Index b = 0; b < nb; ++b) {
      const State& ub = rows[static_cast<size_t>(ns + b)];
      const double nvec[2] = {rom.bnd_nx[static_cast<size_t>(b)],
                              rom.bnd_ny[static_cast<size_t>(b)]};
      const State uplus = law.mirror_state(ub, nvec);
      law.ec_flux(uplus, ub, fs);
      law.flux(ub, fa);
      State pen(n);
      pen.setZero();
      if (cfg.wall_penalty) pen = law.lax_friedrichs_penalty(ub, uplus, nvec);
      double psi[2];
      law.potential(ub, psi);
      for (int dmat = 0; dmat < dims; ++dmat) {
        if (nvec[dmat] == 0.0 && rom.b_diag[static_cast<size_t>(dmat)][b] == 0.0) continue;
        const State fstar = fs[dmat] + nvec[dmat] * pen;
        const double bw = rom.b_diag[static_cast<size_t>(dmat)][b];
        rhs += rom.v_b.row(b).transpose() * (bw * (fstar - fa[dmat])).transpose();
        if (diag) {
          diag->boundary_entropy +=
              bw * (psi[dmat] - ep.v_tilde.row(ns + b).dot(fstar.transpose()));
        }
      }
    }
  }

  double diss = 0.0;
  DenseMatrix d = viscous_rhs(cfg.visc, ep, rom, law, cfg.epsilon, &diss);
  if (diag) {
    diag->viscous_dissipation = diss;
    if (diag->evaluate_all_viscous) {
      viscous_rhs(ViscMode::v1, ep, rom, law, cfg.epsilon, &diag->diss_v1);
      viscous_rhs(ViscMode::v2, ep, rom, law, cfg.epsilon, &diag->diss_v2);
      viscous_rhs(ViscMode::v3, ep, rom, law, cfg.epsilon, &diag->diss_v3);
    }
  }
  rhs += d;

  if (diag) {
    double tot = 0.0;
    for (int c = 0; c < n; ++c) tot += ep.v_n.col(c).dot(rhs.col(c));
    diag->total_entropy_rhs = -tot;
  }
  return -rom.m_n_llt.solve(rhs);
}

DenseMatrix rom_initial_condition(const ReducedBasis& basis, const StateField& u0,
                                  const RomOperators& rom, bool from_sampled) {
  const int n = static_cast<int>(u0.cols());
  DenseMatrix u_n(basis.n_modes(), n);
  if (from_sampled) {
    DenseMatrix u0i(rom.ns(), n);
    for (Index k = 0; k < rom.ns(); ++k)
      u0i.row(k) = u0.row(rom.vol_idx[static_cast<size_t>(k)]);
    u_n = rom.p * u0i;
  } else {
    for (int c = 0; c < n; ++c) u_n.col(c) = lstsq(basis.v, u0.col(c));
  }
  return u_n;
}

namespace {

double rom_wavespeed(const ConservationLaw& law, const StateField& pts) {
  double lam = 0.0;
  for (Index i = 0; i < pts.rows(); ++i)
    lam = std::max(lam, law.max_wavespeed(row_state(pts, i)));
  return lam;
}

}  // namespace

RomTrajectory rom_integrate(const DenseMatrix& u_n0, const RomOperators& rom,
                            const ConservationLaw& law, const RomConfig& cfg,
                            bool all_viscous_diag) {
  RomTrajectory out;
  DenseMatrix u = u_n0;
  const Index flat = u.rows() * u.cols();
  std::vector<DenseMatrix> recorded = {u};
  out.times.push_back(0.0);

  Vector vw = rom.v_vol.transpose() * rom.w_vol;  // conserved-quantity functionals

  double t = 0.0;
  Index step = 0;
  DenseMatrix du = DenseMatrix::Zero(u.rows(), u.cols());
  const double tend = cfg.final_time;
  while (t < tend - 1e-14 * std::max(1.0, tend)) {
    EntropyProjection ep0 = entropy_project(u, rom, law);
    const double lam = rom_wavespeed(law, ep0.u_tilde);
    double dt = cfg.cfl * rom.dx / lam;
    if (t + dt > tend) dt = tend - t;

    RomDiagRow row;
    row.step = step;
    row.time = t;
    row.dt = dt;
    row.total_entropy = 0.0;
    for (Index i = 0; i < rom.ns(); ++i)
      row.total_entropy += rom.w_vol[i] * law.entropy(row_state(ep0.u_vol, i));
    row.conserved.resize(u.cols());
    for (Index c = 0; c < u.cols(); ++c) row.conserved[c] = vw.dot(u.col(c));

    du.setZero();
    try {
      for (int s = 0; s < 5; ++s) {
        RomRhsDiag diag;
        diag.evaluate_all_viscous = all_viscous_diag && s == 0;
        DenseMatrix r = rom_rhs(u, rom, law, cfg, s == 0 ? &diag : nullptr);
        if (s == 0) {
          row.convective_entropy = diag.convective_entropy;
          row.convective_scale = diag.convective_scale;
          row.boundary_entropy = diag.boundary_entropy;
          row.total_entropy_rhs = diag.total_entropy_rhs;
          row.viscous_dissipation = diag.viscous_dissipation;
          row.diss_v1 = diag.diss_v1;
          row.diss_v2 = diag.diss_v2;
          row.diss_v3 = diag.diss_v3;
        }
        du = LowStorageRk::a[s] * du + dt * r;
        u += LowStorageRk::b[s] * du;
      }
    } catch (const PositivityError& e) {
      throw PositivityError(std::string(e.what()) + " (ROM step " + std::to_string(step + 1) +
                                ", t = " + std::to_string(t) + ")",
                            e.point, e.quantity);
    }
    t += dt;
    ++step;
    out.diag.push_back(std::move(row));
    recorded.push_back(u);
    out.times.push_back(t);
  }

  out.coeffs.resize(flat, static_cast<Index>(recorded.size()));
  for (size_t j = 0; j < recorded.size(); ++j) {
    out.coeffs.col(static_cast<Index>(j)) =
        Eigen::Map<const Vector>(recorded[j].data(), flat);
  }
  return out;
}

DenseMatrix dense_galerkin_rhs(const DenseMatrix& u_n, const ReducedBasis& basis,
                               const FomOperators& ops, const ConservationLaw& law,
                               const FomConfig& fcfg) {
  const int n = law.n_components();
  const Index k = basis.v.rows();
  // Entropy projection on the full grid; V has orthonormal columns so the
  // pseudo-inverse is the transpose.
  StateField ugrid = basis.v * u_n;
  StateField vgrid(k, n);
  for (Index i = 0; i < k; ++i) {
    vgrid.row(i) = law.entropy_variables(row_state(ugrid, i)).transpose();
  }
  DenseMatrix v_n = basis.v.transpose() * vgrid;
  StateField vt = basis.v * v_n;
  StateField ut(k, n);
  for (Index i = 0; i < k; ++i) {
    ut.row(i) = law.conservative_from_entropy(row_state(vt, i)).transpose();
  }
  return basis.v.transpose() * fom_rhs(ut, ops, law, fcfg);
}

RomTrajectory dense_galerkin_integrate(const DenseMatrix& u_n0, const ReducedBasis& basis,
                                       const FomOperators& ops, const ConservationLaw& law,
                                       const RomConfig& cfg, BoundaryKind boundary) {
  FomConfig fcfg;
  fcfg.k_cells = ops.k1;
  fcfg.dim = ops.dim;
  fcfg.cfl = cfg.cfl;
  fcfg.epsilon = cfg.epsilon;
  fcfg.boundary = boundary;
  fcfg.wall_penalty = cfg.wall_penalty;

  RomTrajectory out;
  DenseMatrix u = u_n0;
  const Index flat = u.rows() * u.cols();
  std::vector<DenseMatrix> recorded = {u};
  out.times.push_back(0.0);

  double t = 0.0;
  DenseMatrix du = DenseMatrix::Zero(u.rows(), u.cols());
  const double tend = cfg.final_time;
  while (t < tend - 1e-14 * std::max(1.0, tend)) {
    StateField ugrid = basis.v * u;
    const double lam = rom_wavespeed(law, ugrid);
    double dt = cfg.cfl * ops.dx / lam;
    if (t + dt > tend) dt = tend - t;
    du.setZero();
    for (int s = 0; s < 5; ++s) {
      du = LowStorageRk::a[s] * du + dt * dense_galerkin_rhs(u, basis, ops, law, fcfg);
      u += LowStorageRk::b[s] * du;
    }
    t += dt;
    recorded.push_back(u);
    out.times.push_back(t);
  }
  out.coeffs.resize(flat, static_cast<Index>(recorded.size()));
  for (size_t j = 0; j < recorded.size(); ++j) {
    out.coeffs.col(static_cast<Index>(j)) =
        Eigen::Map<const Vector>(recorded[j].data(), flat);
  }
  return out;
}

}  // namespace esrom
