#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skewflow/ensemble.hpp"
#include "skewflow/pm_map.hpp"

namespace skewflow {

// ---------------------------------------------------------------- drift

struct DriftEstimate {
  std::vector<double> c;
  /// Per-component standard error of the mean of p(N)/N.
  std::vector<double> stderr_c;
  std::int64_t n_final = 0;
  std::size_t n_used = 0;
  /// Trajectories left out because they hit x = 0 exactly.
  std::size_t n_excluded = 0;

  double norm() const noexcept;
  /// Euclidean norm of the stderr vector.
  double norm_stderr() const noexcept;
  /// ||c|| > 3 norm_stderr().
  bool significant() const noexcept;
};

/// Mean over trajectories of p(N)/N at the final recorded step N.
/// Throws std::invalid_argument if no trajectory is usable or N < 1000.
DriftEstimate estimate_drift(const EnsembleResult& ensemble, bool exclude_flagged = true);

/// Drift used for detrending: for groups whose drift vanishes by symmetry
/// an estimate that is not significant is replaced by exact zeros.
std::vector<double> effective_drift(const DriftEstimate& drift, GroupType group);

/// Samples (n, p(n) - c n). Throws std::invalid_argument on a dimension mismatch.
TrajectoryRecord detrend(const TrajectoryRecord& record, std::span<const double> c);

// ---------------------------------------------------------------- paths

/// Ensemble of vector-valued paths on a common time grid, already
/// detrended. values[(path * steps.size() + sample) * dim + component].
struct PathSet {
  std::vector<std::int64_t> steps;
  std::size_t n_paths = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t n_samples() const noexcept { return steps.size(); }
  double at(std::size_t path, std::size_t sample, std::size_t comp) const noexcept {
    return values[(path * steps.size() + sample) * dim + comp];
  }
  double& at(std::size_t path, std::size_t sample, std::size_t comp) noexcept {
    return values[(path * steps.size() + sample) * dim + comp];
  }
};

/// Which part of the translation path to analyse.
///   full:       p(n) - c n (all components)
///   component:  p_k(n) - c_k n
///   axis:       E(3) axis channel (requires record_axis)
///   transverse: p(n) - c n minus the axis channel
enum class Channel { full, component, axis, transverse };

std::string_view to_string(Channel ch) noexcept;

/// Throws std::invalid_argument if the channel is unavailable.
PathSet extract_paths(const EnsembleResult& ensemble, std::span<const double> c,
                      Channel channel = Channel::full, std::size_t component = 0,
                      bool exclude_flagged = true);

/// Applies a fixed orthogonal matrix (row-major, dim x dim) to every sample.
PathSet rotate_paths(const PathSet& paths, std::span<const double> rotation);

// ---------------------------------------------------------------- scaling

/// Cross-ensemble statistic whose growth is fitted.
///   median_abs: median of |y(n)|
///   iqr:        interquartile range, averaged over components
///   rms:        sqrt of the mean of |y(n)|^2 (strong chaos only)
enum class Statistic { median_abs, iqr, rms };

std::string_view to_string(Statistic s) noexcept;
std::optional<Statistic> parse_statistic(std::string_view s) noexcept;

/// Value of `statistic` over all paths at one sample.
double ensemble_statistic(const PathSet& paths, std::size_t sample, Statistic statistic);

struct FitOptions {
  int points_per_decade = 10;
  /// Leading and trailing decades of the recorded range left out of the fit.
  double skip_first_decades = 1.0;
  double skip_last_decades = 0.5;
  /// Explicit grid of steps (must be recorded); overrides the geometric grid
  /// and the skips.
  std::vector<std::int64_t> grid;
  /// Bootstrap resamples over trajectories for the stderr; 0 reports the
  /// regression stderr instead.
  int bootstrap = 200;
  std::uint64_t bootstrap_seed = 0x5EEDF00DULL;
  std::size_t min_paths = 100;
};

struct ScalingFit {
  double exponent = 0.0;
  /// Bootstrap standard error (regression stderr when bootstrap = 0).
  double stderr_exponent = 0.0;
  double regression_stderr = 0.0;
  double r_squared = 0.0;
  std::int64_t n_min = 0;
  std::int64_t n_max = 0;
  std::size_t n_points = 0;
  Statistic statistic = Statistic::median_abs;
  std::vector<std::int64_t> grid;
  std::vector<double> values;
};

/// Least-squares fit of log(statistic) against log(n) on a geometric grid.
/// Throws std::invalid_argument for fewer than min_paths paths, fewer than
/// 4 grid points, or a zero statistic on the grid.
ScalingFit scaling_exponent(const PathSet& paths, Statistic statistic = Statistic::median_abs,
                            const FitOptions& options = {});

/// Geometric grid of recorded steps inside the fit window.
std::vector<std::int64_t> fit_grid(std::span<const std::int64_t> recorded, const FitOptions& options);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs at least 3 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------- tails

enum class TailSign { negative, symmetric, positive };
std::string_view to_string(TailSign s) noexcept;

struct TailFit {
  double alpha_hill = 0.0;
  std::size_t k_used = 0;
  std::size_t n = 0;
  /// |X|_(k+1), the tail threshold.
  double threshold = 0.0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  TailSign asymmetry_sign = TailSign::symmetric;
};

/// Hill estimator on the k largest |x|. Asymmetry compares the signs of the
/// k exceedances; within +-2 sqrt(k) is symmetric. Throws
/// std::invalid_argument if n < 1000, k < 20 or k > n/10, and
/// std::domain_error when ties make the log ratios degenerate.
TailFit hill_estimator(std::span<const double> values, std::size_t k);

struct HillSweep {
  std::vector<double> fractions;
  std::vector<TailFit> fits;
  /// Fit at the 1% point.
  TailFit verdict;
  /// False when alpha > 2 at every k of the sweep.
  bool heavy_tailed = true;
};

/// Hill estimates at k = fraction * n for each fraction (default 0.1%, 0.5%,
/// 1%, 5%); fractions whose k is outside [20, n/10] are skipped.
HillSweep hill_sweep(std::span<const double> values,
                     std::span<const double> fractions = std::span<const double>());

/// Non-overlapping increments y(n + L) - y(n) of one component, pooled over
/// paths. L must be a positive multiple of the sample spacing.
std::vector<double> block_increments(const PathSet& paths, std::int64_t block_length,
                                     std::size_t component = 0);

// ---------------------------------------------------------------- laminar phases

struct LaminarStats {
  double x_c = 0.0;
  std::vector<std::int64_t> segment_lengths;
  /// Hill estimate at k = 1% of the segments (at least 20); NaN when there
  /// are fewer than 1000 segments.
  double tail_index = 0.0;
  std::size_t k_used = 0;
};

/// Maximal runs of consecutive iterates with x < x_c. Throws
/// std::invalid_argument unless 0 < x_c < 1/2.
LaminarStats laminar_segments(std::span<const double> orbit, double x_c);

struct LoopExcursion {
  std::int64_t start = 0;
  std::int64_t length = 0;
  /// max over the segment of |p(j) - p(start)|.
  double max_radius = 0.0;
};

/// Excursions of the translation path during laminar segments. Needs a
/// record with stride 1 and recorded x.
std::vector<LoopExcursion> laminar_loop_excursions(const TrajectoryRecord& record, double x_c,
                                                   std::int64_t min_length = 1);

/// Discrete-time bound on a laminar loop for E(2) with velocity v(x) = a + b x
/// (|b| small) and constant rotation rate c0: (sup|v| + total variation of
/// |v| on [0, x_c]) / sin(c0/2).
double discrete_loop_bound(double sup_v, double variation_v, double c0);

// ---------------------------------------------------------------- correlations

struct Autocorrelation {
  std::vector<double> rho;
  double decay_exponent = 0.0;
  double decay_stderr = 0.0;
  double r_squared = 0.0;
  std::int64_t fit_lo = 0;
  std::int64_t fit_hi = 0;
  std::size_t n_values = 0;
};

/// Pools lagged products of several mean-centred series.
class AutocorrelationAccumulator {
 public:
  explicit AutocorrelationAccumulator(std::size_t max_lag);
  /// Throws std::invalid_argument if the series is shorter than 10 max_lag.
  void add(std::span<const double> series);
  /// Normalized autocorrelation and a power-law fit over [fit_lo, fit_hi].
  /// Throws std::domain_error for zero variance.
  Autocorrelation result(std::int64_t fit_lo, std::int64_t fit_hi) const;

 private:
  std::size_t max_lag_;
  std::vector<double> sums_;
  std::vector<double> counts_;
};

Autocorrelation autocorrelation(std::span<const double> series, std::size_t max_lag,
                                std::int64_t fit_lo = 100, std::int64_t fit_hi = 10000);

// ---------------------------------------------------------------- normality

struct NormalityTest {
  std::int64_t step = 0;
  std::size_t n = 0;
  std::vector<double> ks;
  double max_ks() const noexcept;
};

/// Kolmogorov-Smirnov distance between the sample, standardized by its
/// sample standard deviation, and N(0, 1).
double ks_distance_normal(std::vector<double> sample);

/// Per component KS distance of y(n)/sqrt(n) at the recorded step n. Throws
/// std::invalid_argument for fewer than 300 paths or an unrecorded step.
NormalityTest clt_normality(const PathSet& paths, std::int64_t step);

// ---------------------------------------------------------------- Birkhoff averages

struct BirkhoffEstimate {
  double mean = 0.0;
  /// Batch-means standard error.
  double stderr_mean = 0.0;
  std::int64_t n = 0;
};

/// Time average of f along the orbit from sample_initial_condition(seed),
/// after burn_in steps. gamma = 0 uses the exact doubling orbit.
BirkhoffEstimate birkhoff_average(const PMParams& params, const std::function<double(double)>& f,
                                  std::uint64_t seed, std::int64_t n, std::int64_t burn_in = 10000,
                                  int batches = 100);

/// Orbit x_0..x_{n-1} after burn_in steps from sample_initial_condition(seed).
std::vector<double> shape_orbit(const PMParams& params, std::uint64_t seed, std::int64_t n,
                                std::int64_t burn_in = 10000);

// ---------------------------------------------------------------- classification

struct ClassificationBands {
  double diffusive_lo = 0.42;
  double diffusive_hi = 0.58;
  double super_lo = 0.60;
  double super_hi = 0.95;
  double ballistic_above = 0.97;
  double bounded_below = 0.15;
  double max_stderr = 0.05;
};

/// One of drift+diffusive, drift+superdiffusive, diffusive, superdiffusive,
/// bounded, ballistic, or inconclusive.
std::string classify(bool drift_present, const ScalingFit& fit,
                     const ClassificationBands& bands = {});

}  // namespace skewflow
