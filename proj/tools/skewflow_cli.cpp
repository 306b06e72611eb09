// skewflow: simulate, analyze and export plot data for skew-product runs.
//
//   skewflow simulate --config run.cfg --out runs/a
//   skewflow analyze  --run runs/a [--analysis analysis.cfg]
//   skewflow report   --run runs/a --figure fig4
//
// SKEWFLOW_BASE_SEED overrides [seeds] base_seed; SKEWFLOW_WORKERS sets the
// worker count. Exit codes: 0 success, 1 usage or internal error,
// 2 config error, 3 data error.

#include <charconv>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "skewflow/analysis.hpp"
#include "skewflow/io.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDataError = 3;

template <class T>
std::optional<T> env_number(const char* name) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return std::nullopt;
  const std::string_view s(raw);
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw skewflow::ConfigError(std::string(name) + ": cannot parse '" + raw + "'");
  }
  return out;
}

int simulate(const std::string& config_path, const std::string& out_dir) {
  skewflow::SimulationConfig config = skewflow::load_config(config_path);
  if (const auto seed = env_number<std::uint64_t>("SKEWFLOW_BASE_SEED")) config.base_seed = *seed;
  skewflow::RunOptions options;
  if (const auto w = env_number<unsigned>("SKEWFLOW_WORKERS")) options.workers = *w;

  const skewflow::EnsembleResult result = skewflow::run_ensemble(config, options);
  const skewflow::RunManifest m = skewflow::write_run(out_dir, result);
  std::cout << "run written to " << out_dir << "\n"
            << "  kernel       " << m.kernel << "\n"
            << "  steps        " << m.total_steps << " in " << m.wall_seconds << " s\n"
            << "  config_hash  " << m.config_hash << "\n"
            << "  content_hash " << m.content_hash << "\n";
  return 0;
}

int analyze(const std::string& run_dir, const std::string& analysis_path) {
  const skewflow::AnalysisOptions options =
      analysis_path.empty() ? skewflow::AnalysisOptions{} : skewflow::load_analysis_options(analysis_path);
  const nlohmann::json report = skewflow::analyze_run_dir(run_dir, options);
  const auto& cls = report.at("classification");
  std::cout << "analysis written to " << run_dir << "/analysis.json\n"
            << "  classification " << cls.at("label").get<std::string>();
  if (cls.contains("exponent")) {
    std::cout << " (exponent " << cls.at("exponent").get<double>() << " +- " << cls.at("stderr").get<double>()
              << ")";
  }
  std::cout << "\n";
  return 0;
}

int report(const std::string& run_dir, const std::string& figure) {
  const auto fig = skewflow::parse_figure(figure);
  if (!fig) throw CLI::ValidationError("--figure", "expected fig1, fig2, fig3 or fig4");
  for (const auto& p : skewflow::write_figure(run_dir, *fig)) std::cout << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skew-product diffusion simulator and statistics"};
  app.set_version_flag("--version", skewflow::tool_version());
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, analysis_path, figure;
  auto* sim = app.add_subcommand("simulate", "Run an ensemble and write trajectories.csv and manifest.json");
  sim->add_option("--config", config_path, "Run configuration file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();

  auto* ana = app.add_subcommand("analyze", "Compute drift, scaling, tails and the classification");
  ana->add_option("--run", run_dir, "Run directory written by simulate")->required();
  ana->add_option("--analysis", analysis_path, "Analysis settings file");

  auto* rep = app.add_subcommand("report", "Write plot-data files for one figure");
  rep->add_option("--run", run_dir, "Analyzed run directory")->required();
  rep->add_option("--figure", figure, "fig1, fig2, fig3 or fig4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) return simulate(config_path, out_dir);
    if (*ana) return analyze(run_dir, analysis_path);
    return report(run_dir, figure);
  } catch (const skewflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const skewflow::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
