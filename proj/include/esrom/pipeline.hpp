#pragma once

#include "esrom/io.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace esrom {

/// One JSON document drives every stage; unknown keys are rejected.
struct RunConfig {
  std::string preset;  // informational
  std::string law = "euler1d";
  double gamma = 1.4;
  int dim = 1;
  Index k_cells = 0;
  double x0 = -1.0, x1 = 1.0;
  double cfl = 0.75;
  double epsilon = 0.0;
  double final_time = 0.0;
  std::string boundary = "periodic";  // periodic | wall
  std::string ic = "euler1d-periodic";
  double ic_alpha = 0.1, ic_sigma = 0.1;
  Index snapshot_stride = 1;
  Index pod_stride = 1;
  Index modes = 10;
  bool enrich = true;
  bool constant_mode = true;
  bool greedy_argmin = false;
  double cond_threshold = 1e6;
  double alpha_z = 1e-2;
  std::string visc_mode = "v2";  // v1 | v2 | v3 | none
  bool wall_penalty = true;
  bool rom_ic_sampled = false;
  int threads = 1;
  uint64_t seed = 0;

  static RunConfig from_json(const Json& j);
  Json to_json() const;
  std::string fingerprint_self() const;

  FomConfig fom_config() const;
  RomConfig rom_config() const;
  std::shared_ptr<const ConservationLaw> make_law_ptr() const;
  FomOperators make_operators() const;
  BoundaryKind boundary_kind() const;
  ViscMode visc() const;

  void apply_scale(double factor);
};

/// Built-in experiment templates with the section-8 parameter sets.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

StateField make_initial_condition(const RunConfig& cfg);

struct RuleSet {
  CubatureRule volume;  // after any stabilization
  std::optional<CubatureRule> viscous;
  std::optional<CubatureRule> boundary;
  std::string warning;
  double pre_stabilization_condition = 0.0;
  double post_stabilization_condition = 0.0;
  Index volume_points_pre_stabilization = 0;
};

SnapshotSet pipeline_fom(const RunConfig& cfg);
ReducedBasis pipeline_basis(const RunConfig& cfg, const SnapshotSet& snaps);
RuleSet pipeline_rules(const RunConfig& cfg, const ReducedBasis& basis,
                       const FomOperators& ops);
RomOperators pipeline_rom_operators(const RunConfig& cfg, const ReducedBasis& basis,
                                    const RuleSet& rules, const FomOperators& ops);
RomTrajectory pipeline_rom_run(const RunConfig& cfg, const ReducedBasis& basis,
                               const RomOperators& rom, const StateField& u0,
                               bool all_viscous_diag = false);

/// Discrete relative L2 error over all conservative variables.
double relative_l2_error(const StateField& a, const StateField& b);

/// Reconstruct V u_N at a given time by linear interpolation of coefficients.
StateField reconstruct_at(const ReducedBasis& basis, const RomTrajectory& traj,
                          double time, int n_comp);

}  // namespace esrom
