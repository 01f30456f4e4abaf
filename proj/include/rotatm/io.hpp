#pragma once

#include "rotatm/assembly.hpp"
#include "rotatm/atmosphere.hpp"

#include <Eigen/Core>

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace rotatm {

using json = nlohmann::ordered_json;

struct Tolerances {
  double kernel_tol = 1e-10;
  double zero_tol = 1e-8;
  double cluster_tol = 1e-8;
  double reality_tol = 1e-8;
  double residual_tol = 1e-8;
  double stationarity_tol = 1e-5;
  double secular_match_tol = 1e-6;
};

struct RunConfig {
  PhysicalParams params;
  std::string profile_kind = "none";  ///< none | constant
  double profile_value = 0.0;
  int m = 0;
  int cells_s = 8;
  int cells_zeta = 12;
  int order = 8;
  std::string basis = "mixed";
  double kernel_s_max = 0.8;
  Tolerances tol;
  std::string preset;  ///< empty when none was used

  RotationProfile profile() const;
  MeshOptions mesh_options() const;
  BasisOptions basis_options() const;
};

/// Parameters and options from JSON text. Keys:
///   preset: "reference"
///   params: {gm0, r0, r_cap, a_const, gamma, omega | omega_sq}
///   profile: {kind: none | constant, value}
///   mesh: {m, cells_s, cells_zeta, order, basis, kernel_s_max}
///   tolerances: {kernel_tol, zero_tol, cluster_tol, reality_tol, residual_tol,
///                stationarity_tol, secular_match_tol}
/// Throws ConfigError naming the offending field.
RunConfig parse_config_json(const json& j);
RunConfig parse_config(const std::filesystem::path& path);
RunConfig preset_config(const std::string& name);
json config_to_json(const RunConfig& c);

enum class MatrixDtype : std::uint32_t { Float64 = 0, Complex128 = 1 };

/// 64-byte header: "RAPENCL1", uint64 rows, uint64 cols, uint32 dtype, zero padding;
/// then row-major little-endian data.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m, MatrixDtype dtype);
Eigen::MatrixXcd read_matrix(const std::filesystem::path& path, MatrixDtype* dtype = nullptr);
/// Complex128 unless every imaginary part is exactly zero.
MatrixDtype natural_dtype(const Eigen::MatrixXcd& m);

/// a.bin, b.bin, c.bin and pencil.json in dir. Returns the written paths.
std::vector<std::filesystem::path> write_pencil(const std::filesystem::path& dir,
                                                const PencilMatrices& pm, const json& meta);
PencilMatrices read_pencil(const std::filesystem::path& dir);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Canonical text writers. Numbers use %.17g so reruns are byte-identical.
std::string format_double(double v);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

class RunManifest {
 public:
  RunManifest(std::string command, const RunConfig& cfg);
  void add_artifact(const std::filesystem::path& path);
  json to_json() const;
  /// Writes manifest.json into dir and returns its path.
  std::filesystem::path write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  json config_;
  json tolerances_;
  std::string started_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

/// Thread count from ROTATM_THREADS (default 1); throws ConfigError on junk.
int thread_count_from_env();

std::string version_string();

}  // namespace rotatm
