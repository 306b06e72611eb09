#include <fstream>
#include <sstream>

#include "json.hpp"

#include "skewflow/io.hpp"

namespace skewflow {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kTrajectories = "trajectories.csv";
constexpr const char* kMeta = "trajectory_meta.csv";
constexpr const char* kManifest = "manifest.json";

json field_json(const AffineField& f) { return json{{"a", f.a}, {"b", f.b}}; }

json config_json(const SimulationConfig& c) {
  return json{
      {"group", std::string(to_string(c.group))},
      {"dim", c.dim},
      {"gamma", c.params.gamma()},
      {"branch_at_half", c.params.branch_at_half() == HalfBranch::left ? "left" : "right"},
      {"observables",
       {{"phi", field_json(c.spec.phi)},
        {"v", field_json(c.spec.v)},
        {"rot", field_json(c.spec.rotation_generator)}}},
      {"n_steps", c.n_steps},
      {"n_traj", c.n_traj},
      {"burn_in", c.burn_in},
      {"record_stride", c.record_stride},
      {"record_x", c.record_x},
      {"record_axis", c.record_axis},
      {"kernel", std::string(to_string(c.kernel))},
      {"base_seed", c.base_seed},
  };
}

std::string content_hash_of(const std::vector<Artifact>& artifacts) {
  std::string joined;
  for (const Artifact& a : artifacts) joined += a.path + ":" + a.sha256 + "\n";
  return sha256_hex(joined);
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

std::string tool_version() { return SKEWFLOW_VERSION; }

RunManifest write_run(const fs::path& dir, const EnsembleResult& result) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }

  {
    const fs::path p = dir / kTrajectories;
    auto out = open_for_write(p);
    write_trajectories_csv(out, result);
    close_checked(out, p);
  }
  {
    const fs::path p = dir / kMeta;
    auto out = open_for_write(p);
    write_trajectory_meta_csv(out, result);
    close_checked(out, p);
  }

  RunManifest m;
  m.tool_version = tool_version();
  m.config_text = serialize_config(result.config);
  m.config_hash = sha256_hex(m.config_text);
  for (const char* name : {kTrajectories, kMeta}) m.artifacts.push_back({name, sha256_file(dir / name)});
  m.content_hash = content_hash_of(m.artifacts);
  m.kernel = result.kernel;
  m.wall_seconds = result.wall_seconds;
  m.total_steps = result.total_steps;

  json artifacts = json::array();
  for (const Artifact& a : m.artifacts) artifacts.push_back({{"path", a.path}, {"sha256", a.sha256}});
  const json doc{
      {"tool", "skewflow"},
      {"tool_version", m.tool_version},
      {"config", config_json(result.config)},
      {"config_text", m.config_text},
      {"config_hash", m.config_hash},
      {"artifacts", artifacts},
      {"content_hash", m.content_hash},
      {"kernel", m.kernel},
      {"wall_seconds", m.wall_seconds},
      {"total_steps", m.total_steps},
  };
  const fs::path p = dir / kManifest;
  auto out = open_for_write(p);
  out << doc.dump(2) << '\n';
  close_checked(out, p);
  return m;
}

RunManifest read_manifest(const fs::path& dir) {
  const fs::path p = dir / kManifest;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("missing " + p.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt " + p.string() + ": " + e.what());
  }

  RunManifest m;
  try {
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.config_text = doc.at("config_text").get<std::string>();
    m.config_hash = doc.at("config_hash").get<std::string>();
    for (const json& a : doc.at("artifacts")) {
      m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
    }
    m.content_hash = doc.at("content_hash").get<std::string>();
    m.kernel = doc.at("kernel").get<std::string>();
    m.wall_seconds = doc.at("wall_seconds").get<double>();
    m.total_steps = doc.at("total_steps").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw DataError("corrupt " + p.string() + ": " + e.what());
  }

  if (sha256_hex(m.config_text) != m.config_hash) throw DataError("manifest config_hash does not match config_text");
  for (const Artifact& a : m.artifacts) {
    if (a.path.find('/') != std::string::npos || a.path.find("..") != std::string::npos) {
      throw DataError("artifact path escapes the run directory: " + a.path);
    }
    const std::string actual = sha256_file(dir / a.path);
    if (actual != a.sha256) throw DataError("hash mismatch for " + a.path);
  }
  if (content_hash_of(m.artifacts) != m.content_hash) throw DataError("manifest content_hash is inconsistent");
  return m;
}

EnsembleResult load_run(const fs::path& dir) {
  const RunManifest m = read_manifest(dir);
  EnsembleResult result;
  try {
    result.config = parse_config(m.config_text);
  } catch (const ConfigError& e) {
    throw DataError(std::string("manifest config_text is invalid: ") + e.what());
  }
  std::ifstream traj(dir / kTrajectories, std::ios::binary);
  std::ifstream meta(dir / kMeta, std::ios::binary);
  if (!traj || !meta) throw DataError("missing trajectory files in " + dir.string());
  result.records = read_trajectories(traj, meta, result.config);
  result.kernel = m.kernel;
  result.wall_seconds = m.wall_seconds;
  result.total_steps = m.total_steps;
  return result;
}

}  // namespace skewflow
