#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skewflow/ensemble.hpp"
#include "skewflow/stats.hpp"

namespace skewflow {

/// Settings for `analyze`. Text form is a single [analysis] section:
///
///   statistics          = median_abs, iqr, rms
///   points_per_decade   = 10
///   skip_first_decades  = 1
///   skip_last_decades   = 0.5
///   bootstrap           = 200
///   block_length        = 1000   (rounded up to a multiple of record_stride)
///   tail_fractions      = 0.001, 0.005, 0.01, 0.05
///   laminar_x_c         = 0.05, 0.1, 0.2
///   laminar_orbit_steps = 10000000
///   autocorr_max_lag    = 10000
///   autocorr_fit_lo     = 100
///   autocorr_fit_hi     = 10000
///   normality_step      = 0      (0 = last recorded step)
///   loop_x_c            = 0.1
struct AnalysisOptions {
  std::vector<Statistic> statistics{Statistic::median_abs, Statistic::iqr, Statistic::rms};
  FitOptions fit;
  std::int64_t block_length = 1000;
  std::vector<double> tail_fractions{0.001, 0.005, 0.01, 0.05};
  std::vector<double> laminar_x_c{0.05, 0.1, 0.2};
  std::int64_t laminar_orbit_steps = 10'000'000;
  std::size_t autocorr_max_lag = 10000;
  std::int64_t autocorr_fit_lo = 100;
  std::int64_t autocorr_fit_hi = 10000;
  std::int64_t normality_step = 0;
  double loop_x_c = 0.1;
};

/// Throws ConfigError with line and key diagnostics.
AnalysisOptions parse_analysis_options(std::string_view text);
AnalysisOptions load_analysis_options(const std::filesystem::path& path);

/// The full report: drift, scaling fits per channel and statistic, tail
/// sweep, laminar statistics, correlations, normality and the final label.
/// A section that cannot be computed carries an "error" string instead.
nlohmann::json analyze(const EnsembleResult& run, const AnalysisOptions& options = {});

/// Writes analysis.json into the run directory and returns the report.
nlohmann::json analyze_run_dir(const std::filesystem::path& run_dir, const AnalysisOptions& options = {});

enum class Figure { fig1, fig2, fig3, fig4 };
std::optional<Figure> parse_figure(std::string_view s) noexcept;
std::string_view to_string(Figure f) noexcept;

/// Writes whitespace-separated column files into run_dir/figures and returns
/// their paths. Every file starts with a "# config_hash: ..." comment.
///   fig1: regular runs, closed-form path on a fine time grid
///   fig2: e3 runs, traces of the first trajectories
///   fig3: e2 runs, traces plus an inset around the longest laminar phase
///         when the run has stride 1 and recorded x
///   fig4: aniso runs, detrended traces
/// Throws DataError when analysis.json is missing or the figure does not
/// apply to the run's group.
std::vector<std::filesystem::path> write_figure(const std::filesystem::path& run_dir, Figure figure);

}  // namespace skewflow
