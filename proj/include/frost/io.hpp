#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frost/analysis.hpp"
#include "frost/fine_solver.hpp"
#include "frost/materials.hpp"
#include "frost/mesh.hpp"
#include "frost/msfem_offline.hpp"

namespace frost {

// Creates the directory (and parents) if missing.
void ensure_directory(const std::string& path);

// Legacy ASCII VTK snapshot: nodal temperature (and pressure when given a
// vector of matching size), per-cell layer id and frozen flag.
void write_vtk(const std::string& path, const Mesh& mesh,
               const MaterialField& materials, const Eigen::VectorXd& T,
               const Eigen::VectorXd& p);

// Trajectory storage: <prefix>.meta text sidecar plus raw double layers in
// <prefix>_T.bin / <prefix>_p.bin. Round trips are bit exact.
void save_trajectory(const std::string& prefix, const Trajectory& traj);
Trajectory load_trajectory(const std::string& prefix);

// Offline basis cache keyed by a configuration fingerprint. Loading checks
// the magic, the format version and the fingerprint and throws on any
// mismatch or on a truncated file.
void save_basis(const std::string& path, const MultiscaleSpace& space,
                std::uint64_t fingerprint);
MultiscaleSpace load_basis(const std::string& path, std::uint64_t fingerprint);

// Final-layer comparison table, one row per reduced run.
void write_error_csv(const std::string& path, const std::vector<ErrorRow>& rows);

// Per-layer error history of a single run.
void write_series_csv(const std::string& path, const ErrorSeries& series);

}  // namespace frost
