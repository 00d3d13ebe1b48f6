#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "esrom/io.hpp"
#include "esrom/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace esrom;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("esrom_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("esnap round trip is bit exact") {
  TempDir dir;
  RunConfig cfg = preset_config("euler1d-wall");
  cfg.k_cells = 25;
  cfg.final_time = 0.02;
  SnapshotSet s = pipeline_fom(cfg);
  Json meta;
  meta["config"] = cfg.to_json();
  write_esnap(dir.file("a.esnap"), s, meta);

  Json back_meta;
  SnapshotSet t = read_esnap(dir.file("a.esnap"), &back_meta);
  CHECK(t.n_comp == s.n_comp);
  CHECK(t.dim == s.dim);
  CHECK(t.k1 == s.k1);
  CHECK(t.dx == s.dx);
  CHECK(t.states.rows() == s.states.rows());
  CHECK(t.states.cols() == s.states.cols());
  CHECK((t.states - s.states).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t.times == s.times);
  CHECK(t.fingerprint == s.fingerprint);
  CHECK(back_meta["config"] == cfg.to_json());

  // Writing the read-back set again produces identical bytes.
  write_esnap(dir.file("b.esnap"), t, meta);
  std::ifstream fa(dir.file("a.esnap"), std::ios::binary);
  std::ifstream fb(dir.file("b.esnap"), std::ios::binary);
  std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ca == cb);
}

TEST_CASE("esnap header layout is pinned") {
  TempDir dir;
  SnapshotSet s;
  s.n_comp = 2;
  s.dim = 1;
  s.k1 = 3;
  s.dx = 0.5;
  s.states = DenseMatrix::Zero(6, 1);
  s.times = {0.0};
  write_esnap(dir.file("h.esnap"), s, Json::object());
  std::ifstream f(dir.file("h.esnap"), std::ios::binary);
  char magic[8];
  f.read(magic, 8);
  CHECK(std::string(magic, 8) == std::string("ESNAPV1\0", 8));
  auto u64 = [&f] {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  };
  CHECK(u64() == 2);  // n_components
  CHECK(u64() == 3);  // points_per_component
  CHECK(u64() == 1);  // n_snapshots
  CHECK(u64() == 1);  // dim
  uint64_t bits = u64();
  double dx;
  std::memcpy(&dx, &bits, 8);
  CHECK(dx == 0.5);
}

TEST_CASE("ebasis and ecuba round trips") {
  TempDir dir;
  RunConfig cfg = preset_config("euler1d-wall");
  cfg.k_cells = 40;
  cfg.final_time = 0.03;
  cfg.modes = 4;
  cfg.pod_stride = 1;
  SnapshotSet snaps = pipeline_fom(cfg);
  ReducedBasis b = pipeline_basis(cfg, snaps);
  Json meta;
  meta["parent"] = snaps.fingerprint;
  write_ebasis(dir.file("b.ebasis"), b, meta);
  Json m2;
  ReducedBasis c = read_ebasis(dir.file("b.ebasis"), &m2);
  CHECK((c.v - b.v).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.spectrum - b.spectrum).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.tol == b.tol);
  CHECK(c.pod_modes == b.pod_modes);
  CHECK(c.enriched == b.enriched);
  CHECK(c.constant_augmented == b.constant_augmented);
  CHECK(m2["parent"] == snaps.fingerprint);

  FomOperators ops = cfg.make_operators();
  RuleSet rules = pipeline_rules(cfg, b, ops);
  write_ecuba(dir.file("r.ecuba"), rules.volume, meta);
  CubatureRule r = read_ecuba(dir.file("r.ecuba"));
  CHECK(r.indices == rules.volume.indices);
  CHECK((r.weights - rules.volume.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.kind == rules.volume.kind);
  CHECK(r.residual_achieved == rules.volume.residual_achieved);
}

TEST_CASE("eromb round trip reproduces the RHS") {
  TempDir dir;
  RunConfig cfg = preset_config("euler1d-wall");
  cfg.k_cells = 80;
  cfg.final_time = 0.04;
  cfg.modes = 5;
  cfg.pod_stride = 1;
  FomOperators ops = cfg.make_operators();
  auto law = cfg.make_law_ptr();
  SnapshotSet snaps = pipeline_fom(cfg);
  ReducedBasis basis = pipeline_basis(cfg, snaps);
  RuleSet rules = pipeline_rules(cfg, basis, ops);
  RomOperators rom = pipeline_rom_operators(cfg, basis, rules, ops);
  write_eromb(dir.file("m.eromb"), rom, Json::object());
  RomOperators back = read_eromb(dir.file("m.eromb"));

  DenseMatrix u_n = rom_initial_condition(basis, snaps.field(0), rom, false);
  RomConfig rc = cfg.rom_config();
  DenseMatrix r1 = rom_rhs(u_n, rom, *law, rc);
  DenseMatrix r2 = rom_rhs(u_n, back, *law, rc);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectory file round trip and diag csv") {
  TempDir dir;
  RomTrajectory traj;
  traj.coeffs = DenseMatrix::Random(6, 4);
  traj.times = {0.0, 0.1, 0.2, 0.3};
  for (int i = 0; i < 3; ++i) {
    RomDiagRow row;
    row.step = i;
    row.time = 0.1 * i;
    row.conserved = Vector::Ones(3);
    traj.diag.push_back(row);
  }
  write_trajectory(dir.file("t.etraj"), traj, 2, 3, 0.1, 1, Json::object());
  RomTrajectory back = read_trajectory(dir.file("t.etraj"));
  CHECK((back.coeffs - traj.coeffs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.times == traj.times);

  write_diag_csv(dir.file("d.csv"), traj.diag);
  std::ifstream f(dir.file("d.csv"));
  std::string header;
  std::getline(f, header);
  CHECK(header.find("convective_entropy_term") != std::string::npos);
  CHECK(header.find("conserved_2") != std::string::npos);
  int lines = 0;
  std::string line;
  while (std::getline(f, line)) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("bad magic raises an io error") {
  TempDir dir;
  std::ofstream f(dir.file("junk.esnap"), std::ios::binary);
  f << "NOTMAGIC plus some garbage bytes";
  f.close();
  CHECK_THROWS_AS(read_esnap(dir.file("junk.esnap")), Error);
  CHECK_THROWS_AS(read_esnap(dir.file("missing.esnap")), Error);
}

TEST_CASE("fingerprint is stable and input-sensitive") {
  const std::string a = fingerprint("config-a");
  CHECK(a == fingerprint("config-a"));
  CHECK(a != fingerprint("config-b"));
  CHECK(a.size() == 16);
}
