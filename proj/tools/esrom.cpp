#include "esrom/io.hpp"
#include "esrom/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace esrom;
namespace fs = std::filesystem;

namespace {

RunConfig load_config(const std::string& config_path, const std::string& preset,
                      double scale, int threads) {
  RunConfig cfg;
  if (!preset.empty()) {
    cfg = preset_config(preset);
  } else if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) throw IoError("cannot open: " + config_path);
    Json j;
    try {
      j = Json::parse(f);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    cfg = RunConfig::from_json(j);
  } else {
    throw ConfigError("config: either --preset or --config is required");
  }
  if (scale != 1.0) cfg.apply_scale(scale);
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

RunConfig config_from_meta(const Json& meta) {
  if (!meta.contains("config")) throw ConfigError("config: artifact carries no config echo");
  return RunConfig::from_json(meta.at("config"));
}

void require_parent(const Json& meta, const std::string& expected, const std::string& what) {
  const std::string got = meta.value("parent", "");
  if (got != expected) {
    throw ConfigError("fingerprint mismatch: " + what + " was built from " + got +
                      ", expected " + expected);
  }
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

int cmd_fom(const std::string& config_path, const std::string& preset, double scale,
            int threads, const std::string& out) {
  RunConfig cfg = load_config(config_path, preset, scale, threads);
  SnapshotSet snaps = pipeline_fom(cfg);
  Json meta;
  meta["config"] = cfg.to_json();
  meta["fingerprint"] = snaps.fingerprint;
  write_esnap(out_path(out, "snapshots.esnap"), snaps, meta);
  std::cout << "fom: " << snaps.states.cols() << " snapshots, final time "
            << snaps.times.back() << ", fingerprint " << snaps.fingerprint << "\n";
  return 0;
}

int cmd_pod(const std::string& snap_path, Index modes, bool no_enrich, Index pod_stride,
            const std::string& out) {
  Json snap_meta;
  SnapshotSet snaps = read_esnap(snap_path, &snap_meta);
  RunConfig cfg = config_from_meta(snap_meta);
  if (modes > 0) cfg.modes = modes;
  if (no_enrich) cfg.enrich = false;
  if (pod_stride > 0) cfg.pod_stride = pod_stride;

  ReducedBasis basis = pipeline_basis(cfg, snaps);
  Json meta;
  meta["config"] = cfg.to_json();
  meta["parent"] = snaps.fingerprint;
  meta["root"] = snaps.fingerprint;
  meta["fingerprint"] = fingerprint(cfg.to_json().dump() + "|pod|" + snaps.fingerprint);
  write_ebasis(out_path(out, "basis.ebasis"), basis, meta);
  std::cout << "pod: " << basis.n_modes() << " modes (tol " << basis.tol
            << ", constant mode " << (basis.constant_augmented ? "added" : "present")
            << ")\n";
  return 0;
}

int cmd_hyperreduce(const std::string& basis_path, const std::string& out) {
  Json basis_meta;
  ReducedBasis basis = read_ebasis(basis_path, &basis_meta);
  RunConfig cfg = config_from_meta(basis_meta);
  FomOperators ops = cfg.make_operators();
  RuleSet rules = pipeline_rules(cfg, basis, ops);
  if (!rules.warning.empty()) std::cerr << "warning: " << rules.warning << "\n";

  const std::string basis_fp = basis_meta.value("fingerprint", "");
  Json meta;
  meta["config"] = cfg.to_json();
  meta["parent"] = basis_fp;
  meta["root"] = basis_meta.value("root", "");
  meta["fingerprint"] = fingerprint(basis_fp + "|rules");
  meta["points_pre_stabilization"] = rules.volume_points_pre_stabilization;
  meta["condition_pre_stabilization"] = rules.pre_stabilization_condition;
  meta["condition_post_stabilization"] = rules.post_stabilization_condition;
  write_ecuba(out_path(out, "volume.ecuba"), rules.volume, meta);
  std::cout << "hyperreduce: " << rules.volume.indices.size() << " volume points ("
            << rules.volume_points_pre_stabilization << " before stabilization, test-mass"
            << " condition " << rules.post_stabilization_condition << ")\n";
  if (rules.viscous) {
    write_ecuba(out_path(out, "viscous.ecuba"), *rules.viscous, meta);
    std::cout << "hyperreduce: " << rules.viscous->indices.size() << " viscous points\n";
  }
  if (rules.boundary) {
    write_ecuba(out_path(out, "boundary.ecuba"), *rules.boundary, meta);
    std::cout << "hyperreduce: " << rules.boundary->indices.size()
              << " boundary points (constraint residual "
              << rules.boundary->constraint_residual << ")\n";
  }
  return 0;
}

int cmd_rom(const std::string& basis_path, const std::string& rules_dir,
            const std::string& visc, int threads, const std::string& out) {
  Json basis_meta;
  ReducedBasis basis = read_ebasis(basis_path, &basis_meta);
  RunConfig cfg = config_from_meta(basis_meta);
  if (!visc.empty()) cfg.visc_mode = visc;
  if (threads > 0) cfg.threads = threads;
  const std::string basis_fp = basis_meta.value("fingerprint", "");

  Json rule_meta;
  RuleSet rules;
  rules.volume = read_ecuba((fs::path(rules_dir) / "volume.ecuba").string(), &rule_meta);
  require_parent(rule_meta, basis_fp, "volume rule");
  const fs::path visc_path = fs::path(rules_dir) / "viscous.ecuba";
  if (fs::exists(visc_path)) {
    Json m;
    rules.viscous = read_ecuba(visc_path.string(), &m);
    require_parent(m, basis_fp, "viscous rule");
  }
  const fs::path bnd_path = fs::path(rules_dir) / "boundary.ecuba";
  if (fs::exists(bnd_path)) {
    Json m;
    rules.boundary = read_ecuba(bnd_path.string(), &m);
    require_parent(m, basis_fp, "boundary rule");
  }

  FomOperators ops = cfg.make_operators();
  RomOperators rom = pipeline_rom_operators(cfg, basis, rules, ops);
  StateField u0 = make_initial_condition(cfg);
  RomTrajectory traj = pipeline_rom_run(cfg, basis, rom, u0, true);

  Json meta;
  meta["config"] = cfg.to_json();
  meta["parent"] = basis_fp;
  meta["root"] = basis_meta.value("root", "");
  meta["rules"] = rule_meta.value("fingerprint", "");
  meta["fingerprint"] = fingerprint(basis_fp + "|rom|" + cfg.to_json().dump());
  meta["volume_points"] = rom.vol_idx.size();
  meta["boundary_points"] = rom.bnd_idx.size();
  meta["viscous_points"] = rom.visc.left.size();
  write_eromb(out_path(out, "rom.eromb"), rom, meta);
  write_trajectory(out_path(out, "modal.etraj"), traj, basis.n_modes(),
                   cfg.make_law_ptr()->n_components(), ops.dx, ops.dim, meta);
  write_diag_csv(out_path(out, "trajectory.csv"), traj.diag);
  std::cout << "rom: " << traj.times.size() - 1 << " steps to t = " << traj.times.back()
            << ", " << rom.vol_idx.size() << " volume points\n";
  return 0;
}

int cmd_diagnose(const std::string& traj_path, const std::string& basis_path,
                 const std::string& snap_path, bool gnuplot, const std::string& out) {
  Json traj_meta, basis_meta, snap_meta;
  RomTrajectory traj = read_trajectory(traj_path, &traj_meta);
  ReducedBasis basis = read_ebasis(basis_path, &basis_meta);
  SnapshotSet snaps = read_esnap(snap_path, &snap_meta);
  if (traj_meta.value("parent", "") != basis_meta.value("fingerprint", "")) {
    throw ConfigError("fingerprint mismatch: trajectory was built from a different basis");
  }
  if (traj_meta.value("root", "") != snaps.fingerprint) {
    throw ConfigError(
        "fingerprint mismatch: trajectory does not descend from these snapshots");
  }
  RunConfig cfg = config_from_meta(traj_meta);
  auto law = cfg.make_law_ptr();
  const int n = law->n_components();
  const double vol = std::pow(snaps.dx, snaps.dim);
  Vector w = Vector::Constant(snaps.points(), vol);

  std::ofstream err_csv(out_path(out, "error_trace.csv"));
  err_csv.precision(17);
  err_csv << "time,relative_l2_error\n";
  std::ofstream ent_csv(out_path(out, "entropy_trace.csv"));
  ent_csv.precision(17);
  ent_csv << "time,fom_entropy,rom_entropy\n";
  double final_err = 0.0;
  for (Index j = 0; j < snaps.states.cols(); ++j) {
    const double t = snaps.times[static_cast<size_t>(j)];
    StateField fom = snaps.field(j);
    StateField rom = reconstruct_at(basis, traj, t, n);
    const double e = relative_l2_error(rom, fom);
    err_csv << t << ',' << e << '\n';
    ent_csv << t << ',' << total_entropy(fom, *law, w) << ','
            << total_entropy(rom, *law, w) << '\n';
    final_err = e;
  }

  std::ofstream spec_csv(out_path(out, "spectrum.csv"));
  spec_csv.precision(17);
  spec_csv << "mode,singular_value\n";
  for (Index i = 0; i < basis.spectrum.size(); ++i)
    spec_csv << i + 1 << ',' << basis.spectrum[i] << '\n';

  std::ofstream report(out_path(out, "report.txt"));
  report.precision(10);
  report << "final-time relative L2 error: " << final_err << "\n";
  report << "modes: " << basis.n_modes() << " (tol " << basis.tol << ")\n";
  report << "volume points: " << traj_meta.value("volume_points", 0) << "\n";
  report << "boundary points: " << traj_meta.value("boundary_points", 0) << "\n";
  report << "viscous points: " << traj_meta.value("viscous_points", 0) << "\n";
  std::cout << "diagnose: final-time relative L2 error " << final_err << "\n";

  if (gnuplot) {
    std::ofstream gp(out_path(out, "plots.gp"));
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo\n"
       << "set logscale y\n"
       << "set output 'error_trace.png'\n"
       << "plot 'error_trace.csv' using 1:2 with lines\n"
       << "unset logscale y\n"
       << "set output 'entropy_trace.png'\n"
       << "plot 'entropy_trace.csv' using 1:2 with lines, '' using 1:3 with lines\n"
       << "set logscale y\n"
       << "set output 'spectrum.png'\n"
       << "plot 'spectrum.csv' using 1:2 with points\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy-stable hyper-reduced order modeling pipeline"};
  app.require_subcommand(1);

  std::string config_path, preset, out = ".", snapshots, basis_path, rules_dir,
              traj_path, visc;
  double scale = 1.0;
  int threads = 0;
  Index modes = 0, pod_stride = 0;
  bool no_enrich = false, gnuplot = false;

  auto* fom = app.add_subcommand("fom", "run the full-order model, write snapshots");
  fom->add_option("--config", config_path, "JSON config path");
  fom->add_option("--preset", preset, "preset name");
  fom->add_option("--scale", scale, "grid scale factor");
  fom->add_option("--threads", threads, "worker threads");
  fom->add_option("--out", out, "output directory");

  auto* pod = app.add_subcommand("pod", "build the reduced basis from snapshots");
  pod->add_option("--snapshots", snapshots, "snapshot file")->required();
  pod->add_option("--modes", modes, "number of POD modes");
  pod->add_flag("--no-enrich", no_enrich, "skip entropy-variable enrichment");
  pod->add_option("--pod-stride", pod_stride, "snapshot subsampling stride");
  pod->add_option("--out", out, "output directory");

  auto* hyper = app.add_subcommand("hyperreduce", "compute cubature rules");
  hyper->add_option("--basis", basis_path, "basis file")->required();
  hyper->add_option("--out", out, "output directory");

  auto* rom = app.add_subcommand("rom", "run the hyper-reduced model");
  rom->add_option("--basis", basis_path, "basis file")->required();
  rom->add_option("--rules", rules_dir, "rules directory")->required();
  rom->add_option("--visc", visc, "viscous treatment: v1, v2, v3, none");
  rom->add_option("--threads", threads, "worker threads");
  rom->add_option("--out", out, "output directory");

  auto* diag = app.add_subcommand("diagnose", "compare a ROM trajectory against snapshots");
  diag->add_option("--trajectory", traj_path, "modal trajectory file")->required();
  diag->add_option("--basis", basis_path, "basis file")->required();
  diag->add_option("--snapshots", snapshots, "reference snapshot file")->required();
  diag->add_flag("--gnuplot", gnuplot, "emit gnuplot scripts");
  diag->add_option("--out", out, "output directory");

  auto* pre = app.add_subcommand("preset", "preset utilities");
  auto* prelist = pre->add_subcommand("list", "list presets");
  pre->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fom->parsed()) return cmd_fom(config_path, preset, scale, threads, out);
    if (pod->parsed()) return cmd_pod(snapshots, modes, no_enrich, pod_stride, out);
    if (hyper->parsed()) return cmd_hyperreduce(basis_path, out);
    if (rom->parsed()) return cmd_rom(basis_path, rules_dir, visc, threads, out);
    if (diag->parsed()) return cmd_diagnose(traj_path, basis_path, snapshots, gnuplot, out);
    if (pre->parsed() && prelist->parsed()) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const PositivityError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const SpdError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
