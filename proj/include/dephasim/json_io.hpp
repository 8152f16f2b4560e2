#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "dephasim/operational.hpp"

namespace dephasim {

inline constexpr const char* kVersion = "0.1.0";

/// Config ingestion failure; message carries the JSON path of the bad entry.
struct ConfigParseError : ValidationError {
  using ValidationError::ValidationError;
};

nlohmann::json load_json_file(const std::filesystem::path& path);

/// {subsystems, h?, gamma} or {ring: {n, gamma, chi, lambda}}; returns the
/// validated model.
ModelSpec model_from_json(const nlohmann::json& j, const std::string& path = "model");

/// {system: [...], bath: [...]}, 1-based in the file, 0-based in memory.
SplitSpec split_from_json(const nlohmann::json& j, const std::string& path = "split");

/// {product: [[...], ...]} or {full: [...]}.
EnvPopulations env_from_json(const nlohmann::json& j, const std::string& path = "env");

/// Array of rows; each entry [re, im] (bare reals accepted on input).
Matrix matrix_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json matrix_to_json(const Matrix& mat);

/// Either the named qubit builder {first:"x", intermediate:{plane_angle:phi},
/// last:"x"} or explicit stages [{op, value, label}, ...].
MeasurementScheme scheme_from_json(const nlohmann::json& j, long sys_dim,
                                   const std::string& path = "scheme");

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int steps = 2;  // grid point count, >= 2
  std::vector<double> times() const;
};

TimeGrid grid_from_json(const nlohmann::json& j, const std::string& path = "grid");

struct RunConfig {
  ModelSpec model;
  std::optional<SplitSpec> split;
  std::optional<EnvPopulations> env;
  std::optional<Matrix> initial;         // full-space density matrix
  std::optional<Matrix> initial_system;  // system-block density matrix
  TimeGrid grid;
  std::optional<TimeGrid> tau_grid;
  std::optional<MeasurementScheme> scheme;
  std::string out_dir = ".";
  std::optional<unsigned long long> seed;  // reserved
  nlohmann::json raw;
};

RunConfig run_config_from_json(const nlohmann::json& j);

/// rho_s on the system block times the diagonal bath state q, interleaved per
/// the split ordering.
Matrix compose_initial(const ModelSpec& m, const SplitSpec& sp, const Matrix& rho_s,
                       const EnvPopulations& env);

/// 17 significant digits, locale-independent.
std::string fmt_g17(double x);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const nlohmann::json& j);

/// One '#' provenance comment line, one header row, then data rows; cells are
/// written verbatim, so format them first.
void write_csv(const std::filesystem::path& path, const std::string& comment,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace dephasim
