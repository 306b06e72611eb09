#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "skewflow/io.hpp"

namespace skewflow {
namespace {

struct Entry {
  std::string value;
  int line = 0;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"group", {"type", "dim"}},
      {"dynamics", {"gamma", "branch_at_half"}},
      {"observables", {"phi_a", "phi_b", "v_a", "v_b", "rot_a", "rot_b"}},
      {"ensemble",
       {"n_steps", "n_traj", "burn_in", "record_stride", "record_x", "record_axis", "kernel"}},
      {"seeds", {"base_seed"}},
  };
  return s;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const Entry* e = find(key);
    throw ConfigError(key + ": " + what, e ? e->line : 0, key);
  }

  double real(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    return parse_real(key, e->value);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    const std::string& v = e->value;
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec == std::errc() && ptr == v.data() + v.size()) return out;
    // Also accept integral values written in scientific notation, e.g. 1e6.
    const double d = parse_real(key, v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) fail(key, "expected an integer, got '" + v + "'");
    return static_cast<std::int64_t>(d);
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::string_view v = e->value;
    int base = 10;
    if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
      v.remove_prefix(2);
      base = 16;
    }
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      fail(key, "expected an unsigned 64-bit integer, got '" + e->value + "'");
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    const std::string& v = e->value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true or false, got '" + v + "'");
  }

  std::optional<std::vector<double>> list(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    std::string_view rest = e->value;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      if (item.empty()) fail(key, "empty list element in '" + e->value + "'");
      out.push_back(parse_real(key, std::string(item)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

 private:
  double parse_real(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
      fail(key, "expected a number, got '" + v + "'");
    }
    return out;
  }

  std::map<std::string, Entry> entries_;
};

std::size_t default_dim(GroupType g) {
  switch (g) {
    case GroupType::aniso: return 1;
    case GroupType::e2: return 2;
    case GroupType::e3: return 3;
    case GroupType::regular_even: return 2;
    case GroupType::regular_odd: return 3;
  }
  return 1;
}

void apply_field(const Reader& r, const std::string& prefix, AffineField& field) {
  const auto a = r.list(prefix + "_a");
  const auto b = r.list(prefix + "_b");
  if (a) {
    field.a = *a;
    if (!b) field.b.assign(a->size(), 0.0);
  }
  if (b) field.b = *b;
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_shortest(v[i]);
  }
  return out;
}

/// Line of the key a validate() message starts with, if any.
std::pair<int, std::string> locate(const std::map<std::string, Entry>& entries, const std::string& msg) {
  std::pair<int, std::string> best{0, {}};
  for (const auto& [key, e] : entries) {
    const std::string bare = key.substr(key.find('.') + 1);
    if (msg.rfind(bare, 0) == 0 && bare.size() > best.second.size()) best = {e.line, key};
  }
  return best;
}

}  // namespace

SimulationConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;  // "section.key"
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header '" + std::string(line) + "'", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!schema().count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (section.empty()) throw ConfigError("key '" + key + "' outside of any section", line_no, key);
    if (!schema().at(section).count(key)) {
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line_no, key);
    }
    if (value.empty()) throw ConfigError("key '" + key + "' has an empty value", line_no, key);
    const std::string full = section + "." + key;
    if (entries.count(full)) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(entries[full].line) + ")",
                        line_no, key);
    }
    entries[full] = Entry{value, line_no};
  }

  const Reader r(entries);
  SimulationConfig c;
  if (const Entry* e = r.find("group.type")) {
    const auto g = parse_group(e->value);
    if (!g) r.fail("group.type", "unknown group '" + e->value + "'");
    c.group = *g;
  }
  const std::int64_t dim = r.integer("group.dim", static_cast<std::int64_t>(default_dim(c.group)));
  if (dim < 1) r.fail("group.dim", "must be >= 1");
  c.dim = static_cast<std::size_t>(dim);

  HalfBranch branch = HalfBranch::right;
  if (const Entry* e = r.find("dynamics.branch_at_half")) {
    if (e->value == "left") {
      branch = HalfBranch::left;
    } else if (e->value != "right") {
      r.fail("dynamics.branch_at_half", "expected left or right, got '" + e->value + "'");
    }
  }
  const double gamma = r.real("dynamics.gamma", c.params.gamma());
  try {
    c.params = PMParams(gamma, branch);
  } catch (const std::domain_error& err) {
    r.fail("dynamics.gamma", err.what());
  }

  c.spec = default_observables(c.group, c.dim);
  apply_field(r, "observables.phi", c.spec.phi);
  apply_field(r, "observables.v", c.spec.v);
  apply_field(r, "observables.rot", c.spec.rotation_generator);

  c.n_steps = r.integer("ensemble.n_steps", c.n_steps);
  c.n_traj = r.integer("ensemble.n_traj", c.n_traj);
  c.burn_in = r.integer("ensemble.burn_in", c.burn_in);
  c.record_stride = r.integer("ensemble.record_stride", c.record_stride);
  c.record_x = r.boolean("ensemble.record_x", c.record_x);
  c.record_axis = r.boolean("ensemble.record_axis", c.record_axis);
  if (const Entry* e = r.find("ensemble.kernel")) {
    const auto k = parse_kernel(e->value);
    if (!k) r.fail("ensemble.kernel", "unknown kernel '" + e->value + "'");
    c.kernel = *k;
  }
  c.base_seed = r.unsigned64("seeds.base_seed", c.base_seed);

  try {
    validate(c);
  } catch (const std::invalid_argument& err) {
    const auto [line, key] = locate(entries, err.what());
    throw ConfigError(err.what(), line, key);
  }
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimulationConfig& c) {
  std::ostringstream out;
  out << "[group]\n"
      << "type = " << to_string(c.group) << "\n"
      << "dim = " << c.dim << "\n\n"
      << "[dynamics]\n"
      << "gamma = " << format_shortest(c.params.gamma()) << "\n"
      << "branch_at_half = " << (c.params.branch_at_half() == HalfBranch::left ? "left" : "right")
      << "\n\n"
      << "[observables]\n"
      << "phi_a = " << format_list(c.spec.phi.a) << "\n"
      << "phi_b = " << format_list(c.spec.phi.b) << "\n"
      << "v_a = " << format_list(c.spec.v.a) << "\n"
      << "v_b = " << format_list(c.spec.v.b) << "\n"
      << "rot_a = " << format_list(c.spec.rotation_generator.a) << "\n"
      << "rot_b = " << format_list(c.spec.rotation_generator.b) << "\n\n"
      << "[ensemble]\n"
      << "n_steps = " << c.n_steps << "\n"
      << "n_traj = " << c.n_traj << "\n"
      << "burn_in = " << c.burn_in << "\n"
      << "record_stride = " << c.record_stride << "\n"
      << "record_x = " << (c.record_x ? "true" : "false") << "\n"
      << "record_axis = " << (c.record_axis ? "true" : "false") << "\n"
      << "kernel = " << to_string(c.kernel) << "\n\n"
      << "[seeds]\n"
      << "base_seed = " << c.base_seed << "\n";
  return out.str();
}

std::string config_hash(const SimulationConfig& config) { return sha256_hex(serialize_config(config)); }

}  // namespace skewflow
