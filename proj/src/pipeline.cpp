#include "esrom/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace esrom {

namespace {

const char* const kKnownKeys[] = {
    "preset",       "law",           "gamma",         "dim",
    "k_cells",      "x0",            "x1",            "cfl",
    "epsilon",      "final_time",    "boundary",      "ic",
    "ic_alpha",     "ic_sigma",      "snapshot_stride", "pod_stride",
    "modes",        "enrich",        "constant_mode", "greedy_argmin",
    "cond_threshold", "alpha_z",     "visc_mode",     "wall_penalty",
    "rom_ic_sampled", "threads",     "seed",
};

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : kKnownKeys) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("config: unknown key '" + it.key() + "'");
  }
  RunConfig c;
  c.preset = j.value("preset", c.preset);
  c.law = j.value("law", c.law);
  c.gamma = j.value("gamma", c.gamma);
  c.dim = j.value("dim", c.dim);
  c.k_cells = j.value("k_cells", c.k_cells);
  c.x0 = j.value("x0", c.x0);
  c.x1 = j.value("x1", c.x1);
  c.cfl = j.value("cfl", c.cfl);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.final_time = j.value("final_time", c.final_time);
  c.boundary = j.value("boundary", c.boundary);
  c.ic = j.value("ic", c.ic);
  c.ic_alpha = j.value("ic_alpha", c.ic_alpha);
  c.ic_sigma = j.value("ic_sigma", c.ic_sigma);
  c.snapshot_stride = j.value("snapshot_stride", c.snapshot_stride);
  c.pod_stride = j.value("pod_stride", c.pod_stride);
  c.modes = j.value("modes", c.modes);
  c.enrich = j.value("enrich", c.enrich);
  c.constant_mode = j.value("constant_mode", c.constant_mode);
  c.greedy_argmin = j.value("greedy_argmin", c.greedy_argmin);
  c.cond_threshold = j.value("cond_threshold", c.cond_threshold);
  c.alpha_z = j.value("alpha_z", c.alpha_z);
  c.visc_mode = j.value("visc_mode", c.visc_mode);
  c.wall_penalty = j.value("wall_penalty", c.wall_penalty);
  c.rom_ic_sampled = j.value("rom_ic_sampled", c.rom_ic_sampled);
  c.threads = j.value("threads", c.threads);
  c.seed = j.value("seed", c.seed);
  if (c.k_cells < 3) throw ConfigError("config: k_cells must be >= 3");
  if (!(c.cfl > 0)) throw ConfigError("config: cfl must be positive");
  if (c.epsilon < 0) throw ConfigError("config: epsilon must be >= 0");
  if (c.dim != 1 && c.dim != 2) throw ConfigError("config: dim must be 1 or 2");
  if (c.boundary != "periodic" && c.boundary != "wall")
    throw ConfigError("config: boundary must be periodic or wall");
  if (c.visc_mode != "v1" && c.visc_mode != "v2" && c.visc_mode != "v3" &&
      c.visc_mode != "none")
    throw ConfigError("config: visc_mode must be one of v1, v2, v3, none");
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["preset"] = preset;
  j["law"] = law;
  j["gamma"] = gamma;
  j["dim"] = dim;
  j["k_cells"] = k_cells;
  j["x0"] = x0;
  j["x1"] = x1;
  j["cfl"] = cfl;
  j["epsilon"] = epsilon;
  j["final_time"] = final_time;
  j["boundary"] = boundary;
  j["ic"] = ic;
  j["ic_alpha"] = ic_alpha;
  j["ic_sigma"] = ic_sigma;
  j["snapshot_stride"] = snapshot_stride;
  j["pod_stride"] = pod_stride;
  j["modes"] = modes;
  j["enrich"] = enrich;
  j["constant_mode"] = constant_mode;
  j["greedy_argmin"] = greedy_argmin;
  j["cond_threshold"] = cond_threshold;
  j["alpha_z"] = alpha_z;
  j["visc_mode"] = visc_mode;
  j["wall_penalty"] = wall_penalty;
  j["rom_ic_sampled"] = rom_ic_sampled;
  j["threads"] = threads;
  j["seed"] = seed;
  return j;
}

std::string RunConfig::fingerprint_self() const { return fingerprint(to_json().dump()); }

FomConfig RunConfig::fom_config() const {
  FomConfig f;
  f.k_cells = k_cells;
  f.dim = dim;
  f.x0 = x0;
  f.x1 = x1;
  f.cfl = cfl;
  f.epsilon = epsilon;
  f.final_time = final_time;
  f.boundary = boundary_kind();
  f.snapshot_stride = snapshot_stride;
  f.wall_penalty = wall_penalty;
  f.threads = threads;
  return f;
}

RomConfig RunConfig::rom_config() const {
  RomConfig r;
  r.cfl = cfl;
  r.epsilon = epsilon;
  r.final_time = final_time;
  r.visc = visc();
  r.wall_penalty = wall_penalty;
  r.ic_from_sampled = rom_ic_sampled;
  r.threads = threads;
  return r;
}

std::shared_ptr<const ConservationLaw> RunConfig::make_law_ptr() const {
  return make_law(law, gamma);
}

FomOperators RunConfig::make_operators() const {
  return make_fom_operators(k_cells, (x1 - x0) / static_cast<double>(k_cells),
                            boundary == "periodic", dim);
}

BoundaryKind RunConfig::boundary_kind() const {
  return boundary == "periodic" ? BoundaryKind::periodic : BoundaryKind::wall;
}

ViscMode RunConfig::visc() const {
  if (visc_mode == "v1") return ViscMode::v1;
  if (visc_mode == "v2") return ViscMode::v2;
  if (visc_mode == "v3") return ViscMode::v3;
  return ViscMode::none;
}

void RunConfig::apply_scale(double factor) {
  if (!(factor > 0)) throw ConfigError("scale must be positive");
  k_cells = std::max<Index>(3, static_cast<Index>(std::llround(k_cells * factor)));
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "euler1d-wall") {
    c.law = "euler1d";
    c.dim = 1;
    c.k_cells = 2500;
    c.cfl = 0.75;
    c.epsilon = 2e-4;
    c.final_time = 0.7;
    c.boundary = "wall";
    c.ic = "euler1d-wall";
    c.pod_stride = 5;
    c.modes = 25;
    c.visc_mode = "v2";
  } else if (name == "kh2d") {
    c.law = "euler2d";
    c.dim = 2;
    c.k_cells = 200;
    c.cfl = 0.75;
    c.epsilon = 1e-3;
    c.final_time = 3.0;
    c.boundary = "periodic";
    c.ic = "kh2d";
    c.ic_alpha = 0.1;
    c.ic_sigma = 0.1;
    c.snapshot_stride = 10;
    c.modes = 75;
    c.visc_mode = "v3";
  } else if (name == "pulse2d") {
    c.law = "euler2d";
    c.dim = 2;
    c.k_cells = 150;
    c.cfl = 0.5;
    c.epsilon = 1e-3;
    c.final_time = 0.25;
    c.boundary = "wall";
    c.ic = "pulse2d";
    c.modes = 25;
    c.visc_mode = "v3";
    c.cond_threshold = 100.0;
  } else if (name == "burgers1d") {
    c.law = "burgers";
    c.dim = 1;
    c.k_cells = 512;
    c.cfl = 0.5;
    c.epsilon = 1e-4;
    c.final_time = 1.0;
    c.boundary = "periodic";
    c.ic = "burgers-sine";
    c.modes = 15;
    c.visc_mode = "v2";
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return c;
}

std::vector<std::string> preset_names() {
  return {"euler1d-wall", "kh2d", "pulse2d", "burgers1d"};
}

StateField make_initial_condition(const RunConfig& cfg) {
  const FomConfig f = cfg.fom_config();
  if (cfg.ic == "euler1d-wall") return ic_euler1d_wall(f, cfg.gamma);
  if (cfg.ic == "euler1d-periodic") return ic_euler1d_periodic(f, cfg.gamma);
  if (cfg.ic == "kh2d") return ic_kh2d(f, cfg.gamma, cfg.ic_alpha, cfg.ic_sigma);
  if (cfg.ic == "pulse2d") return ic_pulse2d(f, cfg.gamma);
  if (cfg.ic == "burgers-sine") return ic_burgers_sine(f);
  throw ConfigError("unknown initial condition: " + cfg.ic);
}

SnapshotSet pipeline_fom(const RunConfig& cfg) {
  const auto law = cfg.make_law_ptr();
  const FomOperators ops = cfg.make_operators();
  SnapshotSet snaps = rk_integrate(make_initial_condition(cfg), ops, *law, cfg.fom_config());
  snaps.fingerprint = fingerprint(cfg.to_json().dump());
  return snaps;
}

ReducedBasis pipeline_basis(const RunConfig& cfg, const SnapshotSet& snaps) {
  const auto law = cfg.make_law_ptr();
  DenseMatrix m = assemble_snapshots(snaps, cfg.pod_stride, cfg.enrich, *law);
  ReducedBasis b = pod(m, cfg.modes);
  b.enriched = cfg.enrich;
  if (cfg.constant_mode) b = ensure_constant_mode(std::move(b));
  return b;
}

RuleSet pipeline_rules(const RunConfig& cfg, const ReducedBasis& basis,
                       const FomOperators& ops) {
  RuleSet rules;
  const double vol = std::pow(ops.dx, ops.dim);
  const Vector w_target = Vector::Constant(ops.n_points(), vol);
  DenseMatrix v_target = target_space(basis.v, basis.tol);

  GreedyOptions gopts;
  gopts.argmin = cfg.greedy_argmin;
  rules.volume = empirical_cubature(v_target, w_target, basis.tol, gopts);
  rules.volume_points_pre_stabilization = static_cast<Index>(rules.volume.indices.size());

  std::vector<DenseMatrix> test_bases;
  for (int d = 0; d < ops.dim; ++d) test_bases.push_back(build_test_basis(basis.v, ops, d));

  double cond_pre = 0.0;
  for (const auto& vt : test_bases)
    cond_pre = std::max(cond_pre, test_mass_condition(vt, rules.volume));
  rules.pre_stabilization_condition = cond_pre;

  rules.volume = stabilizing_points(test_bases, rules.volume, v_target, w_target,
                                    cfg.cond_threshold, cfg.alpha_z, basis.tol,
                                    &rules.warning);
  double cond_post = 0.0;
  for (const auto& vt : test_bases)
    cond_post = std::max(cond_post, test_mass_condition(vt, rules.volume));
  rules.post_stabilization_condition = cond_post;

  if (cfg.visc() != ViscMode::none && cfg.visc() != ViscMode::v3) {
    rules.viscous = viscous_points(ops, basis.v, basis.tol);
  } else if (cfg.visc() == ViscMode::v3) {
    rules.viscous = viscous_points(ops, basis.v, basis.tol);  // reported in summaries
  }

  if (!ops.periodic && ops.dim == 2) {
    std::vector<DenseMatrix> v_bt;
    std::vector<Vector> rhs;
    std::vector<Index> bidx;
    for (const auto& bp : ops.boundary) bidx.push_back(bp.grid);
    for (int d = 0; d < ops.dim; ++d) {
      DenseMatrix rows(static_cast<Index>(bidx.size()), test_bases[static_cast<size_t>(d)].cols());
      for (Index k = 0; k < rows.rows(); ++k)
        rows.row(k) = test_bases[static_cast<size_t>(d)].row(bidx[static_cast<size_t>(k)]);
      v_bt.push_back(std::move(rows));
      rhs.push_back(test_bases[static_cast<size_t>(d)].transpose() * qt_one(ops, d));
    }
    DenseMatrix v_b(static_cast<Index>(bidx.size()), basis.v.cols());
    for (Index k = 0; k < v_b.rows(); ++k)
      v_b.row(k) = basis.v.row(bidx[static_cast<size_t>(k)]);
    rules.boundary = boundary_weights(v_bt, ops.boundary, rhs, v_b, ops.dx, basis.tol);
  }
  return rules;
}

RomOperators pipeline_rom_operators(const RunConfig& cfg, const ReducedBasis& basis,
                                    const RuleSet& rules, const FomOperators& ops) {
  const CubatureRule* visc = rules.viscous ? &*rules.viscous : nullptr;
  const CubatureRule* bnd = rules.boundary ? &*rules.boundary : nullptr;
  (void)cfg;
  return build_rom_operators(basis, ops, rules.volume, visc, bnd);
}

RomTrajectory pipeline_rom_run(const RunConfig& cfg, const ReducedBasis& basis,
                               const RomOperators& rom, const StateField& u0,
                               bool all_viscous_diag) {
  const auto law = cfg.make_law_ptr();
  DenseMatrix u_n0 = rom_initial_condition(basis, u0, rom, cfg.rom_ic_sampled);
  return rom_integrate(u_n0, rom, *law, cfg.rom_config(), all_viscous_diag);
}

double relative_l2_error(const StateField& a, const StateField& b) {
  return (a - b).norm() / b.norm();
}

StateField reconstruct_at(const ReducedBasis& basis, const RomTrajectory& traj,
                          double time, int n_comp) {
  const Index n_modes = basis.n_modes();
  const auto& times = traj.times;
  Index j = 0;
  while (j + 1 < static_cast<Index>(times.size()) && times[static_cast<size_t>(j + 1)] < time)
    ++j;
  Vector coeff;
  if (j + 1 >= static_cast<Index>(times.size())) {
    coeff = traj.coeffs.col(static_cast<Index>(times.size()) - 1);
  } else {
    const double t0 = times[static_cast<size_t>(j)];
    const double t1 = times[static_cast<size_t>(j + 1)];
    const double w = t1 > t0 ? (time - t0) / (t1 - t0) : 0.0;
    coeff = (1.0 - w) * traj.coeffs.col(j) + w * traj.coeffs.col(j + 1);
  }
  Eigen::Map<const DenseMatrix> u_n(coeff.data(), n_modes, n_comp);
  return basis.v * u_n;
}

}  // namespace esrom
