#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skewflow/config.hpp"
#include "skewflow/ensemble.hpp"

namespace skewflow {

/// Malformed or invalid configuration. line() is 0 when the problem is not
/// tied to a single line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Missing or corrupt run data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Run configuration text: '#' comments, [section] headers and key = value
// lines. Sections and keys (all optional):
//
//   [group]        type = aniso|e2|e3|regular_even|regular_odd, dim
//   [dynamics]     gamma, branch_at_half = left|right
//   [observables]  phi_a, phi_b, v_a, v_b, rot_a, rot_b (comma-separated)
//   [ensemble]     n_steps, n_traj, burn_in, record_stride, record_x,
//                  record_axis, kernel = auto|avx512|avx2|scalar|reference
//   [seeds]        base_seed
//
// Missing observables take default_observables(type, dim).

/// Throws ConfigError with the line and key of the first problem, including
/// failures of validate().
SimulationConfig parse_config(std::string_view text);
SimulationConfig load_config(const std::filesystem::path& path);

/// Canonical text form: every key, shortest round-trip number formatting.
/// parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimulationConfig& config);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// SHA-256 of serialize_config(config).
std::string config_hash(const SimulationConfig& config);

/// Numbers are written with 17 significant digits so that reading them back
/// reproduces every value exactly.
std::string format_double(double v);

/// traj_index, step, p_1..p_d, then x if recorded, then axis_1..axis_3 if
/// recorded. One contiguous block per trajectory in index order.
void write_trajectories_csv(std::ostream& out, const EnsembleResult& result);
/// traj_index, seed, x0, hit_exact_zero, rotation_error.
void write_trajectory_meta_csv(std::ostream& out, const EnsembleResult& result);

/// Rebuilds records from the two CSV files. Throws DataError on malformed
/// rows or a mismatch with `config`.
std::vector<TrajectoryRecord> read_trajectories(std::istream& trajectories, std::istream& meta,
                                                const SimulationConfig& config);

struct Artifact {
  std::string path;  // relative to the run directory
  std::string sha256;
};

struct RunManifest {
  std::string tool_version;
  std::string config_text;
  std::string config_hash;
  std::vector<Artifact> artifacts;
  /// SHA-256 over "path:sha256\n" for each artifact in order.
  std::string content_hash;
  std::string kernel;
  double wall_seconds = 0.0;
  std::int64_t total_steps = 0;
};

std::string tool_version();

/// Writes trajectories.csv, trajectory_meta.csv and manifest.json into `dir`
/// (created if needed). Throws DataError if the directory is unwritable.
RunManifest write_run(const std::filesystem::path& dir, const EnsembleResult& result);

/// Reads manifest.json and verifies artifact hashes.
RunManifest read_manifest(const std::filesystem::path& dir);

/// Loads a run written by write_run. Throws DataError on missing files,
/// hash mismatches or malformed content.
EnsembleResult load_run(const std::filesystem::path& dir);

}  // namespace skewflow
