#pragma once

#include "esrom/operators.hpp"
#include "esrom/physics.hpp"
#include "esrom/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace esrom {

enum class BoundaryKind { periodic, wall };

struct FomConfig {
  Index k_cells = 0;  // per direction
  int dim = 1;
  double x0 = -1.0, x1 = 1.0;
  double cfl = 0.75;
  double epsilon = 0.0;
  double final_time = 0.0;
  BoundaryKind boundary = BoundaryKind::periodic;
  Index snapshot_stride = 1;
  bool wall_penalty = true;  // local Lax-Friedrichs penalization at walls
  int threads = 1;

  double dx() const { return (x1 - x0) / static_cast<double>(k_cells); }
};

struct SnapshotSet {
  DenseMatrix states;  // (n_comp * points) x samples, column-major
  std::vector<double> times;
  int n_comp = 0;
  int dim = 1;
  Index k1 = 0;
  double dx = 0.0;
  std::string fingerprint;

  Index points() const { return dim == 1 ? k1 : k1 * k1; }
  StateField field(Index j) const {
    return Eigen::Map<const DenseMatrix>(states.col(j).data(), points(), n_comp);
  }
};

/// Optional decomposition of the RHS for diagnostics.
struct RhsParts {
  StateField convective;  // -(1/dx^dim) * 2 (Q o F) 1
  StateField boundary;    // -(1/dx^dim) * B (f* - f(u))
  StateField viscous;     // -eps K u
};

StateField fom_rhs(const StateField& u, const FomOperators& ops,
                   const ConservationLaw& law, const FomConfig& cfg,
                   RhsParts* parts = nullptr);

/// Called once per RK stage with the stage state, before its RHS evaluation.
using StageHook = std::function<void(double t, const StateField& u)>;

SnapshotSet rk_integrate(const StateField& u0, const FomOperators& ops,
                         const ConservationLaw& law, const FomConfig& cfg,
                         const StageHook& hook = {});

double max_wavespeed(const ConservationLaw& law, const StateField& u);

/// Sum_i w_i S(u_i).
double total_entropy(const StateField& u, const ConservationLaw& law, const Vector& w);

struct EntropyBalance {
  double convective_rate;   // v^T convective-part contribution to dS_tot/dt
  double convective_scale;  // sum of |v_i . conv_i| terms, for relative checks
  double viscous_rate;      // -eps dx^dim v^T K u
  double v_K_u;             // v^T K u, nonnegative for admissible fields
};

EntropyBalance entropy_balance(const StateField& u, const FomOperators& ops,
                               const ConservationLaw& law, double epsilon);

/// Carpenter-Kennedy low-storage five-stage fourth-order coefficients.
struct LowStorageRk {
  static const double a[5];
  static const double b[5];
  static const double c[5];
};

// Named initial conditions (paper section 8 displays).
StateField ic_euler1d_wall(const FomConfig& cfg, double gamma);
StateField ic_euler1d_periodic(const FomConfig& cfg, double gamma);
StateField ic_kh2d(const FomConfig& cfg, double gamma, double alpha = 0.1,
                   double sigma = 0.1);
StateField ic_pulse2d(const FomConfig& cfg, double gamma);
StateField ic_burgers_sine(const FomConfig& cfg);

}  // namespace esrom
