#include "esrom/io.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>

namespace esrom {

std::string fingerprint(const std::string& canonical) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

double get_f64(std::istream& is) {
  uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_doubles(std::ostream& os, const double* p, size_t n) {
  for (size_t i = 0; i < n; ++i) put_f64(os, p[i]);
}

void get_doubles(std::istream& is, double* p, size_t n) {
  for (size_t i = 0; i < n; ++i) p[i] = get_f64(is);
}

void put_json(std::ostream& os, const Json& meta) {
  const std::string s = meta.dump();
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

Json get_json(std::istream& is) {
  const uint64_t n = get_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  return Json::parse(s);
}

void put_matrix(std::ostream& os, const DenseMatrix& m) {
  put_u64(os, static_cast<uint64_t>(m.rows()));
  put_u64(os, static_cast<uint64_t>(m.cols()));
  put_doubles(os, m.data(), static_cast<size_t>(m.size()));
}

DenseMatrix get_matrix(std::istream& is) {
  const uint64_t r = get_u64(is);
  const uint64_t c = get_u64(is);
  DenseMatrix m(static_cast<Index>(r), static_cast<Index>(c));
  get_doubles(is, m.data(), r * c);
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, const char* magic) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char got[8];
  is.read(got, 8);
  if (!is || std::memcmp(got, magic, 8) != 0) {
    throw IoError("bad magic in " + path);
  }
  return is;
}

}  // namespace

void write_esnap(const std::string& path, const SnapshotSet& snaps, const Json& meta) {
  auto os = open_out(path);
  os.write("ESNAPV1\0", 8);
  const uint64_t n = static_cast<uint64_t>(snaps.n_comp);
  const uint64_t pts = static_cast<uint64_t>(snaps.points());
  put_u64(os, n);
  put_u64(os, pts);
  put_u64(os, static_cast<uint64_t>(snaps.states.cols()));
  put_u64(os, static_cast<uint64_t>(snaps.dim));
  put_f64(os, snaps.dx);
  put_doubles(os, snaps.states.data(), static_cast<size_t>(snaps.states.size()));
  Json m = meta;
  m["times"] = snaps.times;
  m["fingerprint"] = snaps.fingerprint;
  put_json(os, m);
}

SnapshotSet read_esnap(const std::string& path, Json* meta) {
  auto is = open_in(path, "ESNAPV1\0");
  SnapshotSet s;
  const uint64_t n = get_u64(is);
  const uint64_t pts = get_u64(is);
  const uint64_t cols = get_u64(is);
  s.n_comp = static_cast<int>(n);
  s.dim = static_cast<int>(get_u64(is));
  s.dx = get_f64(is);
  s.k1 = s.dim == 1 ? static_cast<Index>(pts)
                    : static_cast<Index>(std::llround(std::sqrt(static_cast<double>(pts))));
  s.states.resize(static_cast<Index>(n * pts), static_cast<Index>(cols));
  get_doubles(is, s.states.data(), n * pts * cols);
  Json m = get_json(is);
  s.times = m.at("times").get<std::vector<double>>();
  s.fingerprint = m.value("fingerprint", "");
  if (!is) throw IoError("truncated file: " + path);
  if (meta) *meta = m;
  return s;
}

void write_ebasis(const std::string& path, const ReducedBasis& basis, const Json& meta) {
  auto os = open_out(path);
  os.write("EBASISV1", 8);
  put_u64(os, static_cast<uint64_t>(basis.n_modes()));
  put_u64(os, static_cast<uint64_t>(basis.v.rows()));
  put_u64(os, static_cast<uint64_t>(basis.spectrum.size()));
  uint64_t flags = (basis.enriched ? 1u : 0u) | (basis.constant_augmented ? 2u : 0u);
  put_u64(os, flags);
  put_f64(os, basis.tol);
  put_u64(os, static_cast<uint64_t>(basis.pod_modes));
  put_doubles(os, basis.v.data(), static_cast<size_t>(basis.v.size()));
  put_doubles(os, basis.spectrum.data(), static_cast<size_t>(basis.spectrum.size()));
  put_json(os, meta);
}

ReducedBasis read_ebasis(const std::string& path, Json* meta) {
  auto is = open_in(path, "EBASISV1");
  ReducedBasis b;
  const uint64_t modes = get_u64(is);
  const uint64_t pts = get_u64(is);
  const uint64_t spec = get_u64(is);
  const uint64_t flags = get_u64(is);
  b.enriched = flags & 1u;
  b.constant_augmented = flags & 2u;
  b.tol = get_f64(is);
  b.pod_modes = static_cast<Index>(get_u64(is));
  b.v.resize(static_cast<Index>(pts), static_cast<Index>(modes));
  get_doubles(is, b.v.data(), pts * modes);
  b.spectrum.resize(static_cast<Index>(spec));
  get_doubles(is, b.spectrum.data(), spec);
  Json m = get_json(is);
  if (!is) throw IoError("truncated file: " + path);
  if (meta) *meta = m;
  return b;
}

void write_ecuba(const std::string& path, const CubatureRule& rule, const Json& meta) {
  auto os = open_out(path);
  os.write("ECUBAV1\0", 8);
  put_u64(os, static_cast<uint64_t>(rule.kind));
  put_u64(os, static_cast<uint64_t>(rule.indices.size()));
  put_f64(os, rule.residual_achieved);
  put_f64(os, rule.constraint_residual);
  for (Index i : rule.indices) put_u64(os, static_cast<uint64_t>(i));
  put_doubles(os, rule.weights.data(), static_cast<size_t>(rule.weights.size()));
  put_json(os, meta);
}

CubatureRule read_ecuba(const std::string& path, Json* meta) {
  auto is = open_in(path, "ECUBAV1\0");
  CubatureRule r;
  r.kind = static_cast<RuleKind>(get_u64(is));
  const uint64_t n = get_u64(is);
  r.residual_achieved = get_f64(is);
  r.constraint_residual = get_f64(is);
  r.indices.resize(n);
  for (uint64_t i = 0; i < n; ++i) r.indices[i] = static_cast<Index>(get_u64(is));
  r.weights.resize(static_cast<Index>(n));
  get_doubles(is, r.weights.data(), n);
  Json m = get_json(is);
  if (!is) throw IoError("truncated file: " + path);
  if (meta) *meta = m;
  return r;
}

void write_eromb(const std::string& path, const RomOperators& rom, const Json& meta) {
  auto os = open_out(path);
  os.write("EROMBV1\0", 8);
  put_u64(os, static_cast<uint64_t>(rom.dim));
  put_u64(os, rom.wall ? 1 : 0);
  put_u64(os, static_cast<uint64_t>(rom.n_modes));
  put_f64(os, rom.dx);

  put_matrix(os, rom.v_vol);
  put_matrix(os, rom.v_b);
  put_matrix(os, rom.m_n);
  put_matrix(os, rom.p);
  put_u64(os, static_cast<uint64_t>(rom.vol_idx.size()));
  for (Index i : rom.vol_idx) put_u64(os, static_cast<uint64_t>(i));
  put_doubles(os, rom.w_vol.data(), static_cast<size_t>(rom.w_vol.size()));
  put_u64(os, static_cast<uint64_t>(rom.bnd_idx.size()));
  for (size_t i = 0; i < rom.bnd_idx.size(); ++i) {
    put_u64(os, static_cast<uint64_t>(rom.bnd_idx[i]));
    put_f64(os, rom.bnd_nx[i]);
    put_f64(os, rom.bnd_ny[i]);
  }
  if (rom.bnd_idx.size()) put_doubles(os, rom.w_bnd.data(), rom.bnd_idx.size());

  for (int d = 0; d < rom.dim; ++d) {
    put_matrix(os, rom.v_t[static_cast<size_t>(d)]);
    put_matrix(os, rom.q_hat_t[static_cast<size_t>(d)]);
    put_matrix(os, rom.p_t[static_cast<size_t>(d)]);
    put_matrix(os, rom.q_t[static_cast<size_t>(d)]);
    if (rom.wall) {
      put_matrix(os, rom.q_h[static_cast<size_t>(d)]);
      put_matrix(os, rom.e_mat[static_cast<size_t>(d)]);
      put_u64(os, static_cast<uint64_t>(rom.b_diag[static_cast<size_t>(d)].size()));
      put_doubles(os, rom.b_diag[static_cast<size_t>(d)].data(),
                  static_cast<size_t>(rom.b_diag[static_cast<size_t>(d)].size()));
    }
  }

  put_u64(os, static_cast<uint64_t>(rom.visc.left.size()));
  for (size_t i = 0; i < rom.visc.left.size(); ++i) {
    put_u64(os, static_cast<uint64_t>(rom.visc.left[i]));
    put_u64(os, static_cast<uint64_t>(rom.visc.right[i]));
  }
  if (!rom.visc.left.empty()) {
    put_doubles(os, rom.visc.w.data(), rom.visc.left.size());
    put_matrix(os, rom.visc.v_left);
    put_matrix(os, rom.visc.v_right);
    put_matrix(os, rom.visc.dv);
  }
  put_matrix(os, rom.visc.vkv);
  put_json(os, meta);
}

RomOperators read_eromb(const std::string& path, Json* meta) {
  auto is = open_in(path, "EROMBV1\0");
  RomOperators rom;
  rom.dim = static_cast<int>(get_u64(is));
  rom.wall = get_u64(is) != 0;
  rom.n_modes = static_cast<Index>(get_u64(is));
  rom.dx = get_f64(is);

  rom.v_vol = get_matrix(is);
  rom.v_b = get_matrix(is);
  rom.m_n = get_matrix(is);
  rom.p = get_matrix(is);
  const uint64_t nv = get_u64(is);
  rom.vol_idx.resize(nv);
  for (uint64_t i = 0; i < nv; ++i) rom.vol_idx[i] = static_cast<Index>(get_u64(is));
  rom.w_vol.resize(static_cast<Index>(nv));
  get_doubles(is, rom.w_vol.data(), nv);
  const uint64_t nb = get_u64(is);
  rom.bnd_idx.resize(nb);
  rom.bnd_nx.resize(nb);
  rom.bnd_ny.resize(nb);
  for (uint64_t i = 0; i < nb; ++i) {
    rom.bnd_idx[i] = static_cast<Index>(get_u64(is));
    rom.bnd_nx[i] = get_f64(is);
    rom.bnd_ny[i] = get_f64(is);
  }
  if (nb) {
    rom.w_bnd.resize(static_cast<Index>(nb));
    get_doubles(is, rom.w_bnd.data(), nb);
  }

  for (int d = 0; d < rom.dim; ++d) {
    rom.v_t.push_back(get_matrix(is));
    rom.q_hat_t.push_back(get_matrix(is));
    rom.p_t.push_back(get_matrix(is));
    rom.q_t.push_back(get_matrix(is));
    if (rom.wall) {
      rom.q_h.push_back(get_matrix(is));
      rom.e_mat.push_back(get_matrix(is));
      const uint64_t m = get_u64(is);
      Vector b(static_cast<Index>(m));
      get_doubles(is, b.data(), m);
      rom.b_diag.push_back(std::move(b));
    }
  }

  const uint64_t mi = get_u64(is);
  rom.visc.left.resize(mi);
  rom.visc.right.resize(mi);
  for (uint64_t i = 0; i < mi; ++i) {
    rom.visc.left[i] = static_cast<Index>(get_u64(is));
    rom.visc.right[i] = static_cast<Index>(get_u64(is));
  }
  if (mi) {
    rom.visc.w.resize(static_cast<Index>(mi));
    get_doubles(is, rom.visc.w.data(), mi);
    rom.visc.v_left = get_matrix(is);
    rom.visc.v_right = get_matrix(is);
    rom.visc.dv = get_matrix(is);
  }
  rom.visc.vkv = get_matrix(is);
  Json m = get_json(is);
  if (!is) throw IoError("truncated file: " + path);
  if (meta) *meta = m;
  rom.m_n_llt.compute(rom.m_n);
  return rom;
}

void write_trajectory(const std::string& path, const RomTrajectory& traj, Index n_modes,
                      int n_comp, double dx, int dim, const Json& meta) {
  SnapshotSet s;
  s.states = traj.coeffs;
  s.times = traj.times;
  s.n_comp = n_comp;
  s.dim = 1;  // modal layout: points_per_component = n_modes
  s.k1 = n_modes;
  s.dx = dx;
  Json m = meta;
  m["modal"] = true;
  m["grid_dim"] = dim;
  s.fingerprint = meta.value("fingerprint", "");
  write_esnap(path, s, m);
}

RomTrajectory read_trajectory(const std::string& path, Json* meta) {
  Json m;
  SnapshotSet s = read_esnap(path, &m);
  if (!m.value("modal", false)) throw IoError("not a modal trajectory file: " + path);
  RomTrajectory t;
  t.coeffs = s.states;
  t.times = s.times;
  if (meta) *meta = m;
  return t;
}

void write_diag_csv(const std::string& path, const std::vector<RomDiagRow>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(17);
  os << "step,time,total_entropy,convective_entropy_term,convective_scale,"
        "boundary_entropy_term,total_entropy_rhs,viscous_dissipation,diss_v1,diss_v2,diss_v3";
  const Index ncons = rows.empty() ? 0 : rows.front().conserved.size();
  for (Index c = 0; c < ncons; ++c) os << ",conserved_" << c;
  os << ",dt\n";
  for (const auto& r : rows) {
    os << r.step << ',' << r.time << ',' << r.total_entropy << ',' << r.convective_entropy
       << ',' << r.convective_scale << ',' << r.boundary_entropy << ','
       << r.total_entropy_rhs << ',' << r.viscous_dissipation << ',' << r.diss_v1 << ','
       << r.diss_v2 << ',' << r.diss_v3;
    for (Index c = 0; c < r.conserved.size(); ++c) os << ',' << r.conserved[c];
    os << ',' << r.dt << '\n';
  }
}

}  // namespace esrom
