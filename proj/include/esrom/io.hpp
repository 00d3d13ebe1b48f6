#pragma once

#include "esrom/basis.hpp"
#include "esrom/cubature.hpp"
#include "esrom/fom.hpp"
#include "esrom/rom.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace esrom {

using Json = nlohmann::json;

/// FNV-1a 64-bit over the canonical dump, hex-encoded.
std::string fingerprint(const std::string& canonical);

/// Snapshot file "ESNAP v1": magic ESNAPV1\0, little-endian u64 n_components,
/// u64 points_per_component, u64 n_snapshots, u64 dim, f64 dx, column-major
/// f64 payload, length-prefixed UTF-8 JSON metadata. Bit-exact round trip.
void write_esnap(const std::string& path, const SnapshotSet& snaps, const Json& meta);
SnapshotSet read_esnap(const std::string& path, Json* meta = nullptr);

/// Basis file "EBASIS v1": ESNAP envelope, payload = V, spectrum, tol, flags.
void write_ebasis(const std::string& path, const ReducedBasis& basis, const Json& meta);
ReducedBasis read_ebasis(const std::string& path, Json* meta = nullptr);

/// Rule file "ECUBA v1": kind tag, u64 indices, f64 weights, achieved residual.
void write_ecuba(const std::string& path, const CubatureRule& rule, const Json& meta);
CubatureRule read_ecuba(const std::string& path, Json* meta = nullptr);

/// ROM bundle "EROMB v1": every RomOperators matrix plus rule references.
void write_eromb(const std::string& path, const RomOperators& rom, const Json& meta);
RomOperators read_eromb(const std::string& path, Json* meta = nullptr);

/// Modal trajectory reuses the ESNAP envelope (points_per_component = modes).
void write_trajectory(const std::string& path, const RomTrajectory& traj, Index n_modes,
                      int n_comp, double dx, int dim, const Json& meta);
RomTrajectory read_trajectory(const std::string& path, Json* meta = nullptr);

void write_diag_csv(const std::string& path, const std::vector<RomDiagRow>& rows);

}  // namespace esrom
