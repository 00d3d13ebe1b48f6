#include "esrom/fom.hpp"

#include <cmath>

namespace esrom {

// Carpenter & Kennedy RK4(5)2N coefficients.
const double LowStorageRk::a[5] = {
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
};
const double LowStorageRk::b[5] = {
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
};
const double LowStorageRk::c[5] = {
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
};

namespace {

// Flux-differencing along one grid line: out_i += sign * [f_S(i, i+1) - f_S(i-1, i)],
// with SBP end closures when not periodic. `idx` maps line position to grid row.
void line_flux_differencing(const ConservationLaw& law, const StateField& u,
                            int dir, bool periodic,
                            const std::vector<Index>& idx, StateField& out) {
  const Index k = static_cast<Index>(idx.size());
  const int n = law.n_components();
  State fs[2], fprev(n), fa(n);
  // fprev holds the flux on the left of the current cell.
  if (periodic) {
    law.ec_flux(row_state(u, idx[k - 1]), row_state(u, idx[0]), fs);
    fprev = fs[dir];
  } else {
    State fan[2];
    law.flux(row_state(u, idx[0]), fan);
    fprev = fan[dir];  // consistency closure: Q(0,0) contributes -f(u_0)
  }
  for (Index i = 0; i < k; ++i) {
    State fnext(n);
    if (i + 1 < k) {
      law.ec_flux(row_state(u, idx[i]), row_state(u, idx[i + 1]), fs);
      fnext = fs[dir];
    } else if (periodic) {
      law.ec_flux(row_state(u, idx[k - 1]), row_state(u, idx[0]), fs);
      fnext = fs[dir];
    } else {
      State fan[2];
      law.flux(row_state(u, idx[k - 1]), fan);
      fnext = fan[dir];
    }
    out.row(idx[i]) += (fnext - fprev).transpose();
    fprev = fnext;
  }
}

}  // namespace

StateField fom_rhs(const StateField& u, const FomOperators& ops,
                   const ConservationLaw& law, const FomConfig& cfg,
                   RhsParts* parts) {
  check_field_admissible(law, u);
  const Index npts = ops.n_points();
  const int n = law.n_components();
  const double dx = ops.dx;

  StateField conv = StateField::Zero(npts, n);
  if (ops.dim == 1) {
    std::vector<Index> idx(static_cast<size_t>(ops.k1));
    for (Index i = 0; i < ops.k1; ++i) idx[static_cast<size_t>(i)] = i;
    line_flux_differencing(law, u, 0, ops.periodic, idx, conv);
  } else {
    const Index k = ops.k1;
    std::vector<Index> idx(static_cast<size_t>(k));
    for (Index iy = 0; iy < k; ++iy) {  // x lines
      for (Index ix = 0; ix < k; ++ix) idx[static_cast<size_t>(ix)] = ix + iy * k;
      line_flux_differencing(law, u, 0, ops.periodic, idx, conv);
    }
    for (Index ix = 0; ix < k; ++ix) {  // y lines
      for (Index iy = 0; iy < k; ++iy) idx[static_cast<size_t>(iy)] = ix + iy * k;
      line_flux_differencing(law, u, 1, ops.periodic, idx, conv);
    }
  }

  StateField bnd = StateField::Zero(npts, n);
  if (cfg.boundary == BoundaryKind::wall) {
    State fs[2], fan[2];
    for (const BoundaryPoint& bp : ops.boundary) {
      const double nvec[2] = {bp.nx, bp.ny};
      const State ui = row_state(u, bp.grid);
      const State up = law.mirror_state(ui, nvec);
      law.ec_flux(up, ui, fs);
      law.flux(ui, fan);
      State pen(n);
      pen.setZero();
      if (cfg.wall_penalty) pen = law.lax_friedrichs_penalty(ui, up, nvec);
      for (int d = 0; d < ops.dim; ++d) {
        if (nvec[d] == 0.0) continue;
        const State fstar = fs[d] + nvec[d] * pen;
        bnd.row(bp.grid) += nvec[d] * (fstar - fan[d]).transpose();
      }
    }
  }

  StateField visc;
  if (cfg.epsilon > 0.0) {
    visc = -cfg.epsilon * apply_k(ops, u);
  } else {
    visc = StateField::Zero(npts, n);
  }

  if (parts) {
    parts->convective = -conv / dx;
    parts->boundary = -bnd / dx;
    parts->viscous = visc;
  }
  return -(conv + bnd) / dx + visc;
}

double max_wavespeed(const ConservationLaw& law, const StateField& u) {
  double lam = 0.0;
  for (Index i = 0; i < u.rows(); ++i) {
    lam = std::max(lam, law.max_wavespeed(row_state(u, i)));
  }
  return lam;
}

SnapshotSet rk_integrate(const StateField& u0, const FomOperators& ops,
                         const ConservationLaw& law, const FomConfig& cfg,
                         const StageHook& hook) {
  check_field_admissible(law, u0);
  SnapshotSet out;
  out.n_comp = law.n_components();
  out.dim = ops.dim;
  out.k1 = ops.k1;
  out.dx = ops.dx;

  StateField u = u0;
  std::vector<StateField> recorded = {u};
  out.times.push_back(0.0);

  double t = 0.0;
  Index step = 0;
  StateField du = StateField::Zero(u.rows(), u.cols());
  const double tend = cfg.final_time;
  while (t < tend - 1e-14 * std::max(1.0, tend)) {
    const double lam = max_wavespeed(law, u);
    double dt = cfg.cfl * ops.dx / lam;
    if (t + dt > tend) dt = tend - t;  // clip last step to hit final_time
    du.setZero();
    try {
      for (int s = 0; s < 5; ++s) {
        if (hook) hook(t + LowStorageRk::c[s] * dt, u);
        du = LowStorageRk::a[s] * du + dt * fom_rhs(u, ops, law, cfg);
        u += LowStorageRk::b[s] * du;
      }
    } catch (const PositivityError& e) {
      throw PositivityError(std::string(e.what()) + " (step " + std::to_string(step + 1) +
                                ", t = " + std::to_string(t) + ")",
                            e.point, e.quantity);
    }
    t += dt;
    ++step;
    if (step % cfg.snapshot_stride == 0) {
      recorded.push_back(u);
      out.times.push_back(t);
    }
  }
  if (out.times.empty() || out.times.back() != t) {
    recorded.push_back(u);
    out.times.push_back(t);
  }

  out.states.resize(u.rows() * u.cols(), static_cast<Index>(recorded.size()));
  for (size_t j = 0; j < recorded.size(); ++j) {
    out.states.col(static_cast<Index>(j)) =
        Eigen::Map<const Vector>(recorded[j].data(), u.rows() * u.cols());
  }
  return out;
}

double total_entropy(const StateField& u, const ConservationLaw& law, const Vector& w) {
  double s = 0.0;
  for (Index i = 0; i < u.rows(); ++i) s += w[i] * law.entropy(row_state(u, i));
  return s;
}

EntropyBalance entropy_balance(const StateField& u, const FomOperators& ops,
                               const ConservationLaw& law, double epsilon) {
  FomConfig cfg;
  cfg.boundary = ops.periodic ? BoundaryKind::periodic : BoundaryKind::wall;
  cfg.epsilon = 0.0;
  RhsParts parts;
  fom_rhs(u, ops, law, cfg, &parts);

  const double vol = std::pow(ops.dx, ops.dim);
  EntropyBalance bal{0.0, 0.0, 0.0, 0.0};
  StateField v(u.rows(), u.cols());
  for (Index i = 0; i < u.rows(); ++i) {
    v.row(i) = law.entropy_variables(row_state(u, i)).transpose();
    const double c = v.row(i).dot(parts.convective.row(i));
    bal.convective_rate += vol * c;
    bal.convective_scale += vol * std::abs(c);
  }
  StateField ku = apply_k(ops, u);
  for (Index i = 0; i < u.rows(); ++i) bal.v_K_u += v.row(i).dot(ku.row(i));
  bal.viscous_rate = -epsilon * vol * bal.v_K_u;
  return bal;
}

StateField ic_euler1d_wall(const FomConfig& cfg, double gamma) {
  const Index k = cfg.k_cells;
  const double dx = cfg.dx();
  StateField u(k, 3);
  for (Index i = 0; i < k; ++i) {
    const double x = cfg.x0 + dx * (static_cast<double>(i) + 0.5);
    const double g = std::exp(-100.0 * (x - 0.5) * (x - 0.5));
    const double rho = 2.0 + 0.5 * g;
    const double vel = 0.1 * g;
    const double p = std::pow(rho, gamma);
    u(i, 0) = rho;
    u(i, 1) = rho * vel;
    u(i, 2) = p / (gamma - 1.0) + 0.5 * rho * vel * vel;
  }
  return u;
}

StateField ic_euler1d_periodic(const FomConfig& cfg, double gamma) {
  const Index k = cfg.k_cells;
  const double dx = cfg.dx();
  StateField u(k, 3);
  for (Index i = 0; i < k; ++i) {
    const double x = cfg.x0 + dx * (static_cast<double>(i) + 0.5);
    const double g = std::exp(-100.0 * x * x);
    const double rho = 2.0 + 0.5 * g;
    const double vel = 0.1 * g;
    const double p = std::pow(rho, gamma);
    u(i, 0) = rho;
    u(i, 1) = rho * vel;
    u(i, 2) = p / (gamma - 1.0) + 0.5 * rho * vel * vel;
  }
  return u;
}

StateField ic_kh2d(const FomConfig& cfg, double gamma, double alpha, double sigma) {
  const Index k = cfg.k_cells;
  const double dx = cfg.dx();
  StateField u(k * k, 4);
  const double s2 = sigma * sigma;
  for (Index iy = 0; iy < k; ++iy) {
    const double y = cfg.x0 + dx * (static_cast<double>(iy) + 0.5);
    const double lo = 1.0 / (1.0 + std::exp(-(y + 0.5) / s2));
    const double hi = 1.0 / (1.0 + std::exp(-(y - 0.5) / s2));
    const double layer = lo - hi;
    const double rho = 1.0 + layer;
    const double ux = layer - 0.5;
    // Gaussian bumps at the two shear layers.
    const double bump = std::exp(-(y + 0.5) * (y + 0.5) / s2) -
                        std::exp(-(y - 0.5) * (y - 0.5) / s2);
    for (Index ix = 0; ix < k; ++ix) {
      const double x = cfg.x0 + dx * (static_cast<double>(ix) + 0.5);
      const double uy = alpha * std::sin(2.0 * M_PI * x) * bump;
      const double p = 2.5;
      const Index pt = ix + iy * k;
      u(pt, 0) = rho;
      u(pt, 1) = rho * ux;
      u(pt, 2) = rho * uy;
      u(pt, 3) = p / (gamma - 1.0) + 0.5 * rho * (ux * ux + uy * uy);
    }
  }
  return u;
}

StateField ic_pulse2d(const FomConfig& cfg, double gamma) {
  const Index k = cfg.k_cells;
  const double dx = cfg.dx();
  StateField u(k * k, 4);
  for (Index iy = 0; iy < k; ++iy) {
    const double y = cfg.x0 + dx * (static_cast<double>(iy) + 0.5);
    for (Index ix = 0; ix < k; ++ix) {
      const double x = cfg.x0 + dx * (static_cast<double>(ix) + 0.5);
      const double rho = 1.0 + std::exp(-50.0 * (x * x + (y + 0.5) * (y + 0.5)));
      const double p = std::pow(rho, gamma);
      const Index pt = ix + iy * k;
      u(pt, 0) = rho;
      u(pt, 1) = 0.0;
      u(pt, 2) = 0.0;
      u(pt, 3) = p / (gamma - 1.0);
    }
  }
  return u;
}

StateField ic_burgers_sine(const FomConfig& cfg) {
  const Index k = cfg.k_cells;
  const double dx = cfg.dx();
  StateField u(k, 1);
  for (Index i = 0; i < k; ++i) {
    const double x = cfg.x0 + dx * (static_cast<double>(i) + 0.5);
    u(i, 0) = -std::sin(M_PI * x);
  }
  return u;
}

}  // namespace esrom
