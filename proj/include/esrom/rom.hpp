#pragma once

#include "esrom/basis.hpp"
#include "esrom/cubature.hpp"
#include "esrom/fom.hpp"

#include <Eigen/Cholesky>

namespace esrom {

enum class ViscMode { none, v1, v2, v3 };

struct RomConfig {
  double cfl = 0.75;
  double epsilon = 0.0;
  double final_time = 0.0;
  ViscMode visc = ViscMode::v2;
  bool wall_penalty = true;   // LF penalization in the boundary flux
  bool ic_from_sampled = false;  // u_N0 = P u0(I) instead of dense projection
  int threads = 1;
};

struct RomViscous {
  std::vector<Index> left, right;  // grid endpoints of each selected interface
  Vector w;                        // W_D
  DenseMatrix v_left, v_right;     // basis rows at the endpoints
  DenseMatrix dv;                  // (D V)(I_D, :)
  DenseMatrix vkv;                 // V^T K V
};

struct RomOperators {
  DenseMatrix v_vol;  // V(I,:)
  DenseMatrix v_b;    // V at selected boundary points (wall only)
  std::vector<Index> vol_idx;
  std::vector<Index> bnd_idx;  // grid indices of the selected boundary points
  std::vector<double> bnd_nx, bnd_ny;
  Vector w_vol, w_bnd;

  std::vector<DenseMatrix> v_t;      // per direction, full grid
  std::vector<DenseMatrix> q_hat_t;  // V_t^T Q V_t
  std::vector<DenseMatrix> p_t;
  std::vector<DenseMatrix> q_t;      // Ns x Ns
  std::vector<DenseMatrix> q_h;      // (Ns+Nb)^2, wall only
  std::vector<DenseMatrix> e_mat;    // E_i = V_bt_i(I_b,:) P_t_i
  std::vector<Vector> b_diag;        // B^i diagonal over selected boundary points

  DenseMatrix m_n;  // V_I^T W V_I
  Eigen::LLT<DenseMatrix> m_n_llt;
  DenseMatrix p;  // M_N^{-1} V_I^T W

  RomViscous visc;
  bool wall = false;
  int dim = 1;
  double dx = 0.0;
  Index n_modes = 0;

  Index ns() const { return v_vol.rows(); }
  Index nb() const { return v_b.rows(); }
};

/// Orthonormal basis of span{1, V, Q^dir V} with rank cut sigma_1 * 1e-10.
DenseMatrix build_test_basis(const DenseMatrix& v, const FomOperators& ops, int dir);

/// P_t = (V_t(I,:)^T W V_t(I,:))^{-1} V_t(I,:)^T W; SpdError means the rule
/// violates Assumption 1 and needs stabilization.
DenseMatrix projection_matrix(const DenseMatrix& vt_rows, const Vector& w);

/// Q_t = P_t^T Qhat P_t; exact skew enforcement for periodic operators.
DenseMatrix hyper_reduced_diff(const DenseMatrix& q_hat, const DenseMatrix& p_t,
                               bool enforce_skew);

/// Q_h = 1/2 [[Q_t - Q_t^T, E^T B], [-B E, B]]; Q_h + Q_h^T = blkdiag(0, B)
/// holds exactly by construction.
DenseMatrix hybridized_sbp(const DenseMatrix& q_t, const DenseMatrix& e,
                           const Vector& b_diag);

RomOperators build_rom_operators(const ReducedBasis& basis, const FomOperators& ops,
                                 const CubatureRule& volume_rule,
                                 const CubatureRule* viscous_rule,
                                 const CubatureRule* boundary_rule);

struct EntropyProjection {
  DenseMatrix u_vol;    // V_I u_N (raw reconstruction at volume points)
  DenseMatrix v_n;      // N x n, projected entropy-variable coefficients
  DenseMatrix v_tilde;  // (Ns+Nb) x n
  StateField u_tilde;   // (Ns+Nb) x n, entropy-projected conservative variables
};

EntropyProjection entropy_project(const DenseMatrix& u_n, const RomOperators& rom,
                                  const ConservationLaw& law);

struct RomRhsDiag {
  double convective_entropy = 0.0;  // v_tilde . conv contributions
  double convective_scale = 0.0;    // sum of |v_tilde_i . conv_i|
  double boundary_entropy = 0.0;    // sum_i 1^T B^i (psi_i(u_b) - v_b^T f_i*)
  double total_entropy_rhs = 0.0;   // d/dt of 1^T W S: -v_N . (modal RHS before the mass solve)
  double viscous_dissipation = 0.0;
  double diss_v1 = 0.0, diss_v2 = 0.0, diss_v3 = 0.0;
  bool evaluate_all_viscous = false;
};

/// du_N/dt of the hyper-reduced model (after the M_N solve).
DenseMatrix rom_rhs(const DenseMatrix& u_n, const RomOperators& rom,
                    const ConservationLaw& law, const RomConfig& cfg,
                    RomRhsDiag* diag = nullptr);

/// Hyper-reduced viscous term d(u_N) (epsilon included); *dissipation = v_N^T d.
DenseMatrix viscous_rhs(ViscMode mode, const EntropyProjection& ep,
                        const RomOperators& rom, const ConservationLaw& law,
                        double epsilon, double* dissipation);

struct RomDiagRow {
  Index step = 0;
  double time = 0.0, dt = 0.0;
  double total_entropy = 0.0;  // 1^T W S(V_I u_N)
  double convective_entropy = 0.0, convective_scale = 0.0;
  double boundary_entropy = 0.0;
  double total_entropy_rhs = 0.0;
  double viscous_dissipation = 0.0;
  double diss_v1 = 0.0, diss_v2 = 0.0, diss_v3 = 0.0;
  Vector conserved;  // per component, w^T V_I u_N
};

struct RomTrajectory {
  DenseMatrix coeffs;  // (N * n) x (steps + 1)
  std::vector<double> times;
  std::vector<RomDiagRow> diag;
};

RomTrajectory rom_integrate(const DenseMatrix& u_n0, const RomOperators& rom,
                            const ConservationLaw& law, const RomConfig& cfg,
                            bool all_viscous_diag = false);

DenseMatrix rom_initial_condition(const ReducedBasis& basis, const StateField& u0,
                                  const RomOperators& rom, bool from_sampled);

/// Un-hyper-reduced Galerkin ROM with entropy projection: the FOM right-hand
/// side evaluated at the entropy-projected field, tested with V.
DenseMatrix dense_galerkin_rhs(const DenseMatrix& u_n, const ReducedBasis& basis,
                               const FomOperators& ops, const ConservationLaw& law,
                               const FomConfig& fcfg);

RomTrajectory dense_galerkin_integrate(const DenseMatrix& u_n0, const ReducedBasis& basis,
                                       const FomOperators& ops, const ConservationLaw& law,
                                       const RomConfig& cfg,
                                       BoundaryKind boundary);

}  // namespace esrom
