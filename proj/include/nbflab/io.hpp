#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "nbflab/mlp.hpp"

namespace nbflab {

/// One steady-state solution field for a fixed Mach number, sampled at the
/// shared grid points.
struct Snapshot {
  double mach = 0.0;
  Eigen::MatrixX2d points;
  Eigen::Matrix<double, Eigen::Dynamic, 4> w;  // [rho, u, v, E] per point
};

/// Formats a double with 17 significant digits (exact round trip).
std::string g17(double v);

/// Writes bytes to path unless an identical file already exists. Refuses to
/// overwrite a differing file without force (throws DataError). Creates parent
/// directories.
void write_file_guarded(const std::filesystem::path& path,
                        const std::string& bytes, bool force);

std::string read_file(const std::filesystem::path& path);

// --- network checkpoints: magic "NBF1", architecture header, then row-major
// little-endian f64 weights/biases per layer ---
std::string encode_checkpoint(const MlpNetwork& net);
MlpNetwork decode_checkpoint(const std::string& bytes,
                             const std::string& name_for_errors);
void save_checkpoint(const std::filesystem::path& path, const MlpNetwork& net,
                     bool force = false);
MlpNetwork load_checkpoint(const std::filesystem::path& path);

// --- snapshots: magic "SNAP", header {mach: f64, n_points: u64}, then
// {x, y, rho, u, v, E} per point as little-endian f64 ---
std::string encode_snapshot(const Snapshot& snap);
Snapshot decode_snapshot(const std::string& bytes,
                         const std::string& name_for_errors);
void save_snapshot(const std::filesystem::path& path, const Snapshot& snap,
                   bool force = false, bool csv_mirror = true);
Snapshot load_snapshot(const std::filesystem::path& path);

/// CSV mirror with header row x,y,rho,u,v,E at 17 significant digits.
std::string snapshot_csv(const Snapshot& snap);
Snapshot parse_snapshot_csv(const std::string& text, double mach,
                            const std::string& name_for_errors);

// --- POD basis per variable: magic "PODB", header {variable id, n, n_BF, D},
// then mean field, singular values, U column-major f64 ---
struct PodBasisFile {
  std::uint32_t variable_id = 0;
  Eigen::VectorXd mean;
  Eigen::VectorXd singular_values;  // length D
  Eigen::MatrixXd modes;            // n x n_BF
};
std::string encode_pod_basis(const PodBasisFile& b);
PodBasisFile decode_pod_basis(const std::string& bytes,
                              const std::string& name_for_errors);
void save_pod_basis(const std::filesystem::path& path, const PodBasisFile& b,
                    bool force = false);
PodBasisFile load_pod_basis(const std::filesystem::path& path);

/// Residual history CSV with header iter,residual.
std::string residual_history_csv(const std::vector<double>& residuals);

}  // namespace nbflab
