#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "skewflow/seeding.hpp"
#include "skewflow/stats.hpp"

namespace skewflow {
namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

/// Linear-interpolation quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double statistic_over(const PathSet& paths, std::size_t sample, std::span<const std::size_t> idx,
                      Statistic statistic, std::vector<double>& scratch) {
  const std::size_t d = paths.dim;
  scratch.clear();
  switch (statistic) {
    case Statistic::median_abs: {
      for (std::size_t i : idx) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += paths.at(i, sample, k) * paths.at(i, sample, k);
        scratch.push_back(std::sqrt(s));
      }
      return median_inplace(scratch);
    }
    case Statistic::iqr: {
      double total = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        scratch.clear();
        for (std::size_t i : idx) scratch.push_back(paths.at(i, sample, k));
        std::sort(scratch.begin(), scratch.end());
        total += quantile_sorted(scratch, 0.75) - quantile_sorted(scratch, 0.25);
      }
      return total / static_cast<double>(d);
    }
    case Statistic::rms: {
      double s = 0.0;
      for (std::size_t i : idx) {
        for (std::size_t k = 0; k < d; ++k) s += paths.at(i, sample, k) * paths.at(i, sample, k);
      }
      return std::sqrt(s / static_cast<double>(idx.size()));
    }
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(Statistic s) noexcept {
  switch (s) {
    case Statistic::median_abs: return "median_abs";
    case Statistic::iqr: return "iqr";
    case Statistic::rms: return "rms";
  }
  return "?";
}

std::optional<Statistic> parse_statistic(std::string_view s) noexcept {
  for (Statistic st : {Statistic::median_abs, Statistic::iqr, Statistic::rms}) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

double ensemble_statistic(const PathSet& paths, std::size_t sample, Statistic statistic) {
  if (paths.n_paths == 0) throw std::invalid_argument("ensemble_statistic: no paths");
  std::vector<std::size_t> idx(paths.n_paths);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> scratch;
  return statistic_over(paths, sample, idx, statistic, scratch);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  if (m != y.size() || m < 3) throw std::invalid_argument("fit_line: needs >= 3 paired points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ssr += e * e;
  }
  f.slope_stderr = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

std::vector<std::int64_t> fit_grid(std::span<const std::int64_t> recorded, const FitOptions& options) {
  if (!options.grid.empty()) {
    for (std::int64_t n : options.grid) {
      if (!std::binary_search(recorded.begin(), recorded.end(), n) || n <= 0) {
        throw std::invalid_argument("fit_grid: step " + std::to_string(n) + " is not a recorded positive step");
      }
    }
    return options.grid;
  }
  const auto first = std::upper_bound(recorded.begin(), recorded.end(), std::int64_t{0});
  if (first == recorded.end()) return {};
  const double lo = static_cast<double>(*first) * std::pow(10.0, options.skip_first_decades);
  const double hi = static_cast<double>(recorded.back()) / std::pow(10.0, options.skip_last_decades);
  std::vector<std::int64_t> grid;
  for (int i = 0;; ++i) {
    const double t = lo * std::pow(10.0, static_cast<double>(i) / options.points_per_decade);
    if (t > hi * (1.0 + 1e-12)) break;
    auto it = std::lower_bound(first, recorded.end(), static_cast<std::int64_t>(std::llround(t)));
    if (it == recorded.end()) --it;
    if (it != first && static_cast<double>(*it) - t > t - static_cast<double>(*(it - 1))) --it;
    const double v = static_cast<double>(*it);
    if (v < lo * (1.0 - 1e-12) || v > hi * (1.0 + 1e-12)) continue;
    if (grid.empty() || grid.back() != *it) grid.push_back(*it);
  }
  return grid;
}

ScalingFit scaling_exponent(const PathSet& paths, Statistic statistic, const FitOptions& options) {
  if (paths.n_paths < options.min_paths) {
    throw std::invalid_argument("scaling_exponent: needs at least " + std::to_string(options.min_paths) +
                                " paths, got " + std::to_string(paths.n_paths));
  }
  ScalingFit fit;
  fit.statistic = statistic;
  fit.grid = fit_grid(paths.steps, options);
  if (fit.grid.size() < 4) {
    throw std::invalid_argument("scaling_exponent: fewer than 4 grid points in the fit window");
  }
  std::vector<std::size_t> samples;
  for (std::int64_t n : fit.grid) {
    samples.push_back(static_cast<std::size_t>(
        std::lower_bound(paths.steps.begin(), paths.steps.end(), n) - paths.steps.begin()));
  }

  std::vector<std::size_t> idx(paths.n_paths);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> scratch;
  std::vector<double> lx, ly;
  for (std::size_t g = 0; g < samples.size(); ++g) {
    const double v = statistic_over(paths, samples[g], idx, statistic, scratch);
    if (!(v > 0.0)) {
      throw std::invalid_argument("scaling_exponent: statistic is zero at step " +
                                  std::to_string(fit.grid[g]));
    }
    fit.values.push_back(v);
    lx.push_back(std::log(static_cast<double>(fit.grid[g])));
    ly.push_back(std::log(v));
  }
  const LineFit line = fit_line(lx, ly);
  fit.exponent = line.slope;
  fit.regression_stderr = line.slope_stderr;
  fit.r_squared = line.r_squared;
  fit.n_min = fit.grid.front();
  fit.n_max = fit.grid.back();
  fit.n_points = fit.grid.size();
  fit.stderr_exponent = line.slope_stderr;

  if (options.bootstrap > 0) {
    SplitMix64 gen(options.bootstrap_seed);
    std::uniform_int_distribution<std::size_t> pick(0, paths.n_paths - 1);
    std::vector<double> slopes;
    std::vector<double> by(samples.size());
    for (int b = 0; b < options.bootstrap; ++b) {
      for (auto& i : idx) i = pick(gen);
      bool ok = true;
      for (std::size_t g = 0; g < samples.size() && ok; ++g) {
        const double v = statistic_over(paths, samples[g], idx, statistic, scratch);
        ok = v > 0.0;
        by[g] = ok ? std::log(v) : 0.0;
      }
      if (ok) slopes.push_back(fit_line(lx, by).slope);
    }
    if (slopes.size() >= 2) {
      const double m = std::accumulate(slopes.begin(), slopes.end(), 0.0) / static_cast<double>(slopes.size());
      double var = 0.0;
      for (double s : slopes) var += (s - m) * (s - m);
      fit.stderr_exponent = std::sqrt(var / static_cast<double>(slopes.size() - 1));
    }
  }
  return fit;
}

}  // namespace skewflow
