#include "skewflow/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "skewflow/io.hpp"
#include "skewflow/seeding.hpp"

namespace skewflow {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Value {
  std::string text;
  int line;
};

template <class T>
T parse_number(const std::string& key, const Value& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc() || ptr != v.text.data() + v.text.size()) {
    throw ConfigError(key + ": cannot parse '" + v.text + "'", v.line, key);
  }
  return out;
}

std::vector<std::string> split_list(const Value& v, const std::string& key) {
  std::vector<std::string> out;
  std::string_view rest = v.text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (item.empty()) throw ConfigError(key + ": empty list element", v.line, key);
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

json fit_json(const ScalingFit& f) {
  return json{{"exponent", f.exponent},         {"stderr", f.stderr_exponent},
              {"regression_stderr", f.regression_stderr}, {"r_squared", f.r_squared},
              {"n_min", f.n_min},               {"n_max", f.n_max},
              {"n_points", f.n_points}};
}

json tail_json(const TailFit& t) {
  return json{{"alpha", t.alpha_hill},
              {"stderr", t.alpha_hill / std::sqrt(static_cast<double>(t.k_used))},
              {"k", t.k_used},
              {"n", t.n},
              {"threshold", t.threshold},
              {"n_positive", t.n_positive},
              {"n_negative", t.n_negative},
              {"asymmetry_sign", std::string(to_string(t.asymmetry_sign))}};
}

template <class F>
json guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return json{{"error", e.what()}};
  }
}

/// Median over paths of max_n |y(n)|.
double median_max_excursion(const PathSet& paths) {
  std::vector<double> peak(paths.n_paths, 0.0);
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    for (std::size_t s = 0; s < paths.n_samples(); ++s) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < paths.dim; ++k) r2 += paths.at(i, s, k) * paths.at(i, s, k);
      peak[i] = std::max(peak[i], r2);
    }
  }
  const auto mid = peak.begin() + static_cast<std::ptrdiff_t>(peak.size() / 2);
  std::nth_element(peak.begin(), mid, peak.end());
  return std::sqrt(*mid);
}

bool is_regular(GroupType g) { return g == GroupType::regular_even || g == GroupType::regular_odd; }

std::vector<Channel> channels_for(const SimulationConfig& c) {
  std::vector<Channel> out{Channel::full};
  if (c.dim > 1) out.push_back(Channel::component);
  if (c.group == GroupType::e3 && c.record_axis) {
    out.push_back(Channel::axis);
    out.push_back(Channel::transverse);
  }
  return out;
}

json scaling_section(const EnsembleResult& run, std::span<const double> c, const AnalysisOptions& o,
                     std::optional<ScalingFit>& headline) {
  json out = json::object();
  for (Channel ch : channels_for(run.config)) {
    const std::size_t n_comp = ch == Channel::component ? run.config.dim : 1;
    for (std::size_t k = 0; k < n_comp; ++k) {
      std::string name(to_string(ch));
      if (ch == Channel::component) name += "_" + std::to_string(k + 1);
      out[name] = guarded([&] {
        const PathSet paths = extract_paths(run, c, ch, k);
        json fits = json::object();
        for (Statistic s : o.statistics) {
          fits[std::string(to_string(s))] = guarded([&] {
            const ScalingFit fit = scaling_exponent(paths, s, o.fit);
            if (ch == Channel::full && s == Statistic::median_abs) headline = fit;
            return fit_json(fit);
          });
        }
        return fits;
      });
    }
  }
  return out;
}

json tails_section(const EnsembleResult& run, std::span<const double> c, const AnalysisOptions& o) {
  const std::int64_t stride = run.config.record_stride;
  const std::int64_t block = ((std::max<std::int64_t>(o.block_length, 1) + stride - 1) / stride) * stride;
  const PathSet paths = extract_paths(run, c, Channel::full);
  json comps = json::array();
  for (std::size_t k = 0; k < paths.dim; ++k) {
    comps.push_back(guarded([&] {
      const auto inc = block_increments(paths, block, k);
      const HillSweep sweep = hill_sweep(inc, o.tail_fractions);
      json fits = json::array();
      for (std::size_t i = 0; i < sweep.fits.size(); ++i) {
        json f = tail_json(sweep.fits[i]);
        f["fraction"] = sweep.fractions[i];
        fits.push_back(f);
      }
      return json{{"component", k + 1}, {"n_increments", inc.size()}, {"sweep", fits},
                  {"verdict", tail_json(sweep.verdict)}, {"heavy_tailed", sweep.heavy_tailed}};
    }));
  }
  return json{{"block_length", block}, {"components", comps}};
}

json laminar_section(const SimulationConfig& cfg, std::span<const double> orbit, std::uint64_t seed,
                     const AnalysisOptions& o) {
  json segs = json::array();
  for (double xc : o.laminar_x_c) {
    segs.push_back(guarded([&] {
      const LaminarStats s = laminar_segments(orbit, xc);
      json j{{"x_c", xc}, {"n_segments", s.segment_lengths.size()}, {"k", s.k_used}};
      if (std::isnan(s.tail_index)) {
        j["tail_index"] = nullptr;
        j["note"] = "fewer than 1000 segments";
      } else {
        j["tail_index"] = s.tail_index;
        j["stderr"] = s.tail_index / std::sqrt(static_cast<double>(s.k_used));
      }
      if (!s.segment_lengths.empty()) {
        j["max_length"] = *std::max_element(s.segment_lengths.begin(), s.segment_lengths.end());
      }
      return j;
    }));
  }
  json out{{"orbit_steps", orbit.size()}, {"orbit_seed", seed}, {"segments", segs}};
  if (cfg.params.gamma() > 0.0) out["expected_tail_index"] = 1.0 / cfg.params.gamma();
  return out;
}

json autocorr_section(std::span<const double> orbit, const AnalysisOptions& o) {
  const Autocorrelation a = autocorrelation(orbit, o.autocorr_max_lag, o.autocorr_fit_lo, o.autocorr_fit_hi);
  std::vector<double> head(a.rho.begin(), a.rho.begin() + std::min<std::size_t>(a.rho.size(), 11));
  return json{{"observable", "x"},         {"decay_exponent", a.decay_exponent},
              {"stderr", a.decay_stderr},   {"r_squared", a.r_squared},
              {"fit_lo", a.fit_lo},         {"fit_hi", a.fit_hi},
              {"rho_first_lags", head}};
}

json loops_section(const EnsembleResult& run, const AnalysisOptions& o) {
  const SimulationConfig& c = run.config;
  if (c.record_stride != 1 || !c.record_x) {
    return json{{"skipped", "needs record_stride = 1 and record_x = true"}};
  }
  const double xc = o.loop_x_c;
  const double sup_v = c.spec.v.sup_norm(0.0, xc);
  const double variation = std::abs(c.spec.v.sup_norm(xc, xc) - c.spec.v.sup_norm(0.0, 0.0));
  const auto h0 = c.spec.rotation_generator(0.0);
  const auto h1 = c.spec.rotation_generator(xc);
  const double c0 = std::min(std::abs(h0[0]), std::abs(h1[0]));
  const double continuous = 2.0 * sup_v / c0;
  const double discrete = discrete_loop_bound(sup_v, variation, c0);
  std::size_t count = 0;
  double worst = 0.0;
  std::int64_t longest = 0;
  for (const TrajectoryRecord& r : run.records) {
    for (const LoopExcursion& e : laminar_loop_excursions(r, xc, 1)) {
      ++count;
      worst = std::max(worst, e.max_radius);
      longest = std::max(longest, e.length);
    }
  }
  return json{{"x_c", xc},
              {"n_segments", count},
              {"longest_segment", longest},
              {"max_radius", worst},
              {"continuous_bound", continuous},
              {"discrete_bound", discrete},
              {"within_bound", worst <= discrete}};
}

}  // namespace

AnalysisOptions parse_analysis_options(std::string_view text) {
  static const std::set<std::string> keys{
      "statistics",      "points_per_decade", "skip_first_decades", "skip_last_decades",
      "bootstrap",       "block_length",      "tail_fractions",     "laminar_x_c",
      "laminar_orbit_steps", "autocorr_max_lag", "autocorr_fit_lo", "autocorr_fit_hi",
      "normality_step",  "loop_x_c"};
  std::map<std::string, Value> values;
  bool in_section = false;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[analysis]") throw ConfigError("unknown section " + std::string(line), line_no);
      in_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    if (!in_section) throw ConfigError("key '" + key + "' outside of [analysis]", line_no, key);
    if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in section [analysis]", line_no, key);
    if (values.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no, key);
    values[key] = Value{std::string(trim(line.substr(eq + 1))), line_no};
  }

  AnalysisOptions o;
  auto has = [&](const char* k) { return values.count(k) > 0; };
  if (has("statistics")) {
    o.statistics.clear();
    for (const auto& s : split_list(values["statistics"], "statistics")) {
      const auto st = parse_statistic(s);
      if (!st) throw ConfigError("statistics: unknown statistic '" + s + "'", values["statistics"].line, "statistics");
      o.statistics.push_back(*st);
    }
  }
  auto real_list = [&](const char* k, std::vector<double>& dst) {
    if (!has(k)) return;
    dst.clear();
    for (const auto& s : split_list(values[k], k)) dst.push_back(parse_number<double>(k, Value{s, values[k].line}));
  };
  if (has("points_per_decade")) o.fit.points_per_decade = parse_number<int>("points_per_decade", values["points_per_decade"]);
  if (has("skip_first_decades")) o.fit.skip_first_decades = parse_number<double>("skip_first_decades", values["skip_first_decades"]);
  if (has("skip_last_decades")) o.fit.skip_last_decades = parse_number<double>("skip_last_decades", values["skip_last_decades"]);
  if (has("bootstrap")) o.fit.bootstrap = parse_number<int>("bootstrap", values["bootstrap"]);
  if (has("block_length")) o.block_length = parse_number<std::int64_t>("block_length", values["block_length"]);
  real_list("tail_fractions", o.tail_fractions);
  real_list("laminar_x_c", o.laminar_x_c);
  if (has("laminar_orbit_steps")) o.laminar_orbit_steps = parse_number<std::int64_t>("laminar_orbit_steps", values["laminar_orbit_steps"]);
  if (has("autocorr_max_lag")) o.autocorr_max_lag = parse_number<std::size_t>("autocorr_max_lag", values["autocorr_max_lag"]);
  if (has("autocorr_fit_lo")) o.autocorr_fit_lo = parse_number<std::int64_t>("autocorr_fit_lo", values["autocorr_fit_lo"]);
  if (has("autocorr_fit_hi")) o.autocorr_fit_hi = parse_number<std::int64_t>("autocorr_fit_hi", values["autocorr_fit_hi"]);
  if (has("normality_step")) o.normality_step = parse_number<std::int64_t>("normality_step", values["normality_step"]);
  if (has("loop_x_c")) o.loop_x_c = parse_number<double>("loop_x_c", values["loop_x_c"]);

  auto bad = [&](const char* k, const std::string& what) {
    throw ConfigError(std::string(k) + ": " + what, has(k) ? values[k].line : 0, k);
  };
  if (o.statistics.empty()) bad("statistics", "at least one statistic is required");
  if (o.fit.points_per_decade < 2) bad("points_per_decade", "must be >= 2");
  if (o.fit.bootstrap < 0) bad("bootstrap", "must be >= 0");
  if (o.block_length < 1) bad("block_length", "must be >= 1");
  if (o.laminar_orbit_steps < 1000) bad("laminar_orbit_steps", "must be >= 1000");
  if (o.autocorr_max_lag < 1) bad("autocorr_max_lag", "must be >= 1");
  if (o.normality_step < 0) bad("normality_step", "must be >= 0");
  if (!(o.loop_x_c > 0.0 && o.loop_x_c < 0.5)) bad("loop_x_c", "must lie in (0, 1/2)");
  return o;
}

AnalysisOptions load_analysis_options(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read analysis file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_analysis_options(ss.str());
}

json analyze(const EnsembleResult& run, const AnalysisOptions& o) {
  const SimulationConfig& cfg = run.config;
  json report{{"config_hash", config_hash(cfg)},
              {"group", std::string(to_string(cfg.group))},
              {"dim", cfg.dim},
              {"gamma", cfg.params.gamma()},
              {"n_traj", cfg.n_traj},
              {"n_steps", cfg.n_steps},
              {"record_stride", cfg.record_stride}};

  std::vector<double> c(cfg.dim, 0.0);
  bool drift_present = false;
  report["drift"] = guarded([&] {
    const DriftEstimate d = estimate_drift(run);
    c = effective_drift(d, cfg.group);
    // A drift only counts when c N also stands out against the excursions of
    // the detrended paths; bounded paths can have a "significant" O(1/N) mean.
    const double spread = median_max_excursion(extract_paths(run, c, Channel::full));
    const double displacement = d.norm() * static_cast<double>(d.n_final);
    drift_present = d.significant() && displacement > 3.0 * spread;
    return json{{"c", d.c},
                {"stderr", d.stderr_c},
                {"norm", d.norm()},
                {"norm_stderr", d.norm_stderr()},
                {"significant", d.significant()},
                {"displacement", displacement},
                {"path_spread", spread},
                {"resolved", drift_present},
                {"detrend_with", c},
                {"n_final", d.n_final},
                {"n_used", d.n_used},
                {"n_excluded", d.n_excluded}};
  });

  std::optional<ScalingFit> headline;
  report["scaling"] = guarded([&] { return scaling_section(run, c, o, headline); });
  report["tails"] = guarded([&] { return tails_section(run, c, o); });

  report["normality"] = guarded([&] {
    const PathSet paths = extract_paths(run, c, Channel::full);
    const std::int64_t step = o.normality_step > 0 ? o.normality_step : paths.steps.back();
    const NormalityTest t = clt_normality(paths, step);
    return json{{"step", t.step},
                {"n", t.n},
                {"ks", t.ks},
                {"max_ks", t.max_ks()},
                {"critical_5pct", 1.358 / std::sqrt(static_cast<double>(t.n))}};
  });

  if (is_regular(cfg.group)) {
    report["laminar"] = json{{"skipped", "regular runs have a frozen shape coordinate"}};
    report["autocorrelation"] = report["laminar"];
  } else {
    const std::uint64_t seed = derive_seed(cfg.base_seed, 0);
    std::vector<double> orbit;
    json orbit_error;
    try {
      orbit = shape_orbit(cfg.params, seed, o.laminar_orbit_steps);
    } catch (const std::exception& e) {
      orbit_error = json{{"error", e.what()}};
    }
    report["laminar"] = orbit_error.is_null() ? guarded([&] { return laminar_section(cfg, orbit, seed, o); }) : orbit_error;
    report["autocorrelation"] = orbit_error.is_null() ? guarded([&] { return autocorr_section(orbit, o); }) : orbit_error;
  }
  if (cfg.group == GroupType::e2) report["loops"] = guarded([&] { return loops_section(run, o); });

  const std::string label = headline ? classify(drift_present, *headline) : "inconclusive";
  json cls{{"label", label}, {"channel", "full"}, {"statistic", "median_abs"}, {"drift_present", drift_present}};
  if (headline) {
    cls["exponent"] = headline->exponent;
    cls["stderr"] = headline->stderr_exponent;
  }
  report["classification"] = cls;

  json stats = json::array();
  for (Statistic s : o.statistics) stats.push_back(std::string(to_string(s)));
  report["settings"] = json{{"statistics", stats},
                            {"points_per_decade", o.fit.points_per_decade},
                            {"skip_first_decades", o.fit.skip_first_decades},
                            {"skip_last_decades", o.fit.skip_last_decades},
                            {"bootstrap", o.fit.bootstrap},
                            {"block_length", o.block_length},
                            {"tail_fractions", o.tail_fractions},
                            {"laminar_x_c", o.laminar_x_c},
                            {"laminar_orbit_steps", o.laminar_orbit_steps},
                            {"autocorr_max_lag", o.autocorr_max_lag},
                            {"autocorr_fit", {o.autocorr_fit_lo, o.autocorr_fit_hi}},
                            {"normality_step", o.normality_step},
                            {"loop_x_c", o.loop_x_c}};
  report["notes"] = json::array(
      {"paths are detrended with the estimated drift; for E(2) and E(3) a drift that is not "
       "significant is replaced by zero",
       "tail indices use non-overlapping block increments of the detrended path, a choice of "
       "this tool rather than a fixed standard",
       "scaling stderr is a bootstrap over trajectories"});
  return report;
}

json analyze_run_dir(const fs::path& run_dir, const AnalysisOptions& options) {
  const EnsembleResult run = load_run(run_dir);
  json report = analyze(run, options);
  report["content_hash"] = read_manifest(run_dir).content_hash;
  const fs::path out = run_dir / "analysis.json";
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + out.string());
  f << report.dump(2) << '\n';
  f.close();
  if (!f) throw DataError("write failed for " + out.string());
  return report;
}

}  // namespace skewflow
