#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "skewflow/ensemble.hpp"
#include "skewflow/seeding.hpp"
#include "skewflow/stats.hpp"

using namespace skewflow;

namespace {

SimulationConfig ensemble_config(GroupType g, std::size_t dim, double gamma, std::int64_t n_traj,
                                 std::int64_t n_steps, std::int64_t stride = 1000) {
  SimulationConfig c;
  c.group = g;
  c.dim = dim;
  c.params = PMParams(gamma);
  c.spec = default_observables(g, dim);
  c.n_traj = n_traj;
  c.n_steps = n_steps;
  c.record_stride = stride;
  c.base_seed = 31337;
  return c;
}

/// Ensemble wrapper around ready-made records, for drift tests.
EnsembleResult from_records(std::vector<TrajectoryRecord> records, std::size_t dim) {
  EnsembleResult e;
  e.config.dim = dim;
  e.records = std::move(records);
  return e;
}

TrajectoryRecord linear_record(std::size_t dim, std::int64_t n, std::int64_t stride, std::vector<double> slope) {
  TrajectoryRecord r;
  r.dim = dim;
  for (std::int64_t s = 0; s <= n; s += stride) {
    r.steps.push_back(s);
    for (double v : slope) r.p.push_back(v * static_cast<double>(s));
  }
  return r;
}

ScalingFit fake_fit(double h, double se) {
  ScalingFit f;
  f.exponent = h;
  f.stderr_exponent = se;
  return f;
}

}  // namespace

// ---------------------------------------------------------------- drift

TEST(Drift, ZeroObservableGivesExactZero) {
  auto c = ensemble_config(GroupType::aniso, 2, 0.7, 20, 5000);
  c.spec.phi = AffineField::constant({0.0, 0.0});
  const auto d = estimate_drift(run_ensemble(c));
  EXPECT_EQ(d.c, (std::vector<double>{0.0, 0.0}));
}

TEST(Drift, DoublingMapMean) {
  // Quadrature oracle: integral of 1 + x over [0, 1] is 1.5.
  const auto d = estimate_drift(run_ensemble(ensemble_config(GroupType::aniso, 1, 0.0, 100, 100'000)));
  EXPECT_NEAR(d.c[0], 1.5, 0.01);
  EXPECT_TRUE(d.significant());
}

TEST(Drift, EuclideanDriftVanishes) {
  const auto d = estimate_drift(run_ensemble(ensemble_config(GroupType::e2, 2, 0.2, 300, 100'000)));
  EXPECT_LE(d.norm(), 3 * d.norm_stderr());
  EXPECT_EQ(effective_drift(d, GroupType::e2), (std::vector<double>{0.0, 0.0}));
}

TEST(Drift, ExactLinearPaths) {
  std::vector<TrajectoryRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(linear_record(2, 4000, 100, {2.0, -0.5}));
  const auto d = estimate_drift(from_records(recs, 2));
  EXPECT_EQ(d.c, (std::vector<double>{2.0, -0.5}));
  EXPECT_EQ(d.n_final, 4000);
  EXPECT_EQ(d.n_used, 10u);
}

TEST(Drift, FlaggedTrajectoriesAreExcluded) {
  std::vector<TrajectoryRecord> recs{linear_record(1, 2000, 100, {1.0}), linear_record(1, 2000, 100, {5.0})};
  recs[1].hit_exact_zero = true;
  const auto d = estimate_drift(from_records(recs, 1));
  EXPECT_EQ(d.c[0], 1.0);
  EXPECT_EQ(d.n_excluded, 1u);
  EXPECT_EQ(estimate_drift(from_records(recs, 1), false).c[0], 3.0);
}

TEST(Drift, ShortRunsRejected) {
  std::vector<TrajectoryRecord> recs{linear_record(1, 500, 100, {1.0})};
  EXPECT_THROW(estimate_drift(from_records(recs, 1)), std::invalid_argument);
}

TEST(Detrend, Basics) {
  const auto r = linear_record(1, 1000, 10, {2.0});
  const double zero[] = {0.0};
  EXPECT_EQ(detrend(r, zero), r);
  const double two[] = {2.0};
  for (double v : detrend(r, two).p) EXPECT_EQ(v, 0.0);
  const double three[] = {3.0};
  EXPECT_THROW(detrend(r, std::vector<double>{1.0, 2.0}), std::invalid_argument);
  // Re-adding the trend restores every sample up to one rounding.
  const auto y = detrend(r, three);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double back = y.p[k] + 3.0 * static_cast<double>(r.steps[k]);
    EXPECT_LE(std::abs(back - r.p[k]), std::numeric_limits<double>::epsilon() * std::abs(r.p[k]));
  }
}

// ---------------------------------------------------------------- paths

TEST(Paths, AxisPlusTransverseIsFull) {
  auto c = ensemble_config(GroupType::e3, 3, 0.7, 10, 20'000, 100);
  c.record_axis = true;
  const auto e = run_ensemble(c);
  const std::vector<double> zero(3, 0.0);
  const auto full = extract_paths(e, zero, Channel::full);
  const auto axis = extract_paths(e, zero, Channel::axis);
  const auto trans = extract_paths(e, zero, Channel::transverse);
  for (std::size_t i = 0; i < full.values.size(); ++i) {
    ASSERT_NEAR(axis.values[i] + trans.values[i], full.values[i], 1e-9 * (1 + std::abs(full.values[i])));
  }
  const auto comp = extract_paths(e, zero, Channel::component, 2);
  EXPECT_EQ(comp.dim, 1u);
  EXPECT_EQ(comp.at(3, 50, 0), full.at(3, 50, 2));
  c.record_axis = false;
  EXPECT_THROW(extract_paths(run_ensemble(c), zero, Channel::axis), std::invalid_argument);
}

TEST(Paths, RotationPreservesNorms) {
  auto ps = oracle::gaussian_walk(5, 100, 1, 3);
  skewflow::PathSet two;
  two.dim = 2;
  two.n_paths = 5;
  two.steps = ps.steps;
  for (std::size_t i = 0; i < ps.values.size(); ++i) {
    two.values.push_back(ps.values[i]);
    two.values.push_back(-0.5 * ps.values[i]);
  }
  const double a = 0.7;
  const std::vector<double> rot{std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
  const auto r = rotate_paths(two, rot);
  for (std::size_t i = 0; i < two.values.size(); i += 2) {
    EXPECT_NEAR(std::hypot(r.values[i], r.values[i + 1]), std::hypot(two.values[i], two.values[i + 1]), 1e-12);
  }
}

// ---------------------------------------------------------------- scaling

TEST(Scaling, GaussianWalk) {
  const auto fit = scaling_exponent(oracle::gaussian_walk(1000, 100'000, 100, 1));
  EXPECT_NEAR(fit.exponent, 0.5, 0.03);
  EXPECT_GT(fit.stderr_exponent, 0.0);
  EXPECT_LT(std::abs(fit.exponent - 0.5), 3 * fit.stderr_exponent + 0.005);
}

TEST(Scaling, StableWalk) {
  const auto fit = scaling_exponent(oracle::stable_walk(1000, 1000, 1000, 1.0 / 0.7, 2));
  EXPECT_NEAR(fit.exponent, 0.7, 0.05);
}

TEST(Scaling, BallisticWalk) {
  for (Statistic s : {Statistic::median_abs, Statistic::iqr, Statistic::rms}) {
    const auto fit = scaling_exponent(oracle::ballistic_walk(200, 1'000'000, 1000, 3), s);
    EXPECT_NEAR(fit.exponent, 1.0, 1e-6) << to_string(s);
  }
}

TEST(Scaling, GridRespectsSkips) {
  std::vector<std::int64_t> rec;
  for (std::int64_t n = 0; n <= 1'000'000; n += 1000) rec.push_back(n);
  const auto g = fit_grid(rec, FitOptions{});
  ASSERT_EQ(g.size(), 16u);  // 1.5 decades at 10 points per decade
  EXPECT_GE(g.front(), 10'000);
  EXPECT_LE(g.back(), 1'000'000 / std::sqrt(10.0) + 1000);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(Scaling, Errors) {
  EXPECT_THROW(scaling_exponent(oracle::gaussian_walk(50, 10'000, 10, 1)), std::invalid_argument);
  const double x[] = {1, 2, 3}, y[] = {2, 4, 6};
  const auto l = fit_line(x, y);
  EXPECT_DOUBLE_EQ(l.slope, 2.0);
  EXPECT_NEAR(l.intercept, 0.0, 1e-15);
  EXPECT_THROW(fit_line(std::span<const double>(x, 2), std::span<const double>(y, 2)), std::invalid_argument);
}

TEST(Scaling, StatisticParsing) {
  EXPECT_EQ(parse_statistic("iqr"), Statistic::iqr);
  EXPECT_EQ(parse_statistic("bogus"), std::nullopt);
}

// ---------------------------------------------------------------- tails

TEST(Hill, ParetoTail) {
  oracle::Rng rng(5);
  std::vector<double> xs(100'000);
  for (double& x : xs) x = oracle::pareto(rng, 1.5);
  const auto fit = hill_estimator(xs, 1000);
  EXPECT_NEAR(fit.alpha_hill, 1.5, 0.1);
  EXPECT_EQ(fit.asymmetry_sign, TailSign::positive);
}

TEST(Hill, GaussianIsNotHeavyTailed) {
  oracle::Rng rng(6);
  std::vector<double> xs(100'000);
  for (double& x : xs) x = oracle::standard_normal(rng);
  const auto sweep = hill_sweep(xs);
  EXPECT_FALSE(sweep.heavy_tailed);
  for (std::size_t i = 1; i < sweep.fits.size(); ++i) EXPECT_LT(sweep.fits[i].alpha_hill, sweep.fits[i - 1].alpha_hill);
  EXPECT_EQ(sweep.verdict.asymmetry_sign, TailSign::symmetric);
}

TEST(Hill, NegativeTail) {
  oracle::Rng rng(7);
  std::vector<double> xs(50'000);
  for (double& x : xs) x = -oracle::pareto(rng, 1.2);
  EXPECT_EQ(hill_estimator(xs, 500).asymmetry_sign, TailSign::negative);
}

TEST(Hill, Errors) {
  std::vector<double> few(999, 1.0);
  EXPECT_THROW(hill_estimator(few, 50), std::invalid_argument);
  std::vector<double> ties(5000, 3.0);
  EXPECT_THROW(hill_estimator(ties, 100), std::domain_error);
  std::vector<double> many(5000, 1.0);
  EXPECT_THROW(hill_estimator(many, 10), std::invalid_argument);
  EXPECT_THROW(hill_estimator(many, 600), std::invalid_argument);
}

TEST(Hill, BlockIncrements) {
  const auto ps = oracle::ballistic_walk(3, 10'000, 100, 9);
  const auto inc = block_increments(ps, 1000);
  ASSERT_EQ(inc.size(), 30u);
  EXPECT_NEAR(inc[0], 1000 * ps.at(0, 1, 0) / 100, 1e-9);
  EXPECT_THROW(block_increments(ps, 150), std::invalid_argument);
}

TEST(Hill, WeakChaosFlightsPointDown) {
  const auto c = ensemble_config(GroupType::aniso, 1, 0.7, 300, 1'000'000);
  const auto e = run_ensemble(c);
  const auto d = estimate_drift(e);
  const auto inc = block_increments(extract_paths(e, d.c), 10'000);
  const auto sweep = hill_sweep(inc);
  EXPECT_EQ(sweep.verdict.asymmetry_sign, TailSign::negative);
}

// ---------------------------------------------------------------- laminar phases

TEST(Laminar, DirectSegmentation) {
  const double above[] = {0.3, 0.6, 0.2};
  EXPECT_TRUE(laminar_segments(above, 0.1).segment_lengths.empty());
  const double orbit[] = {0.01, 0.02, 0.6, 0.005, 0.7};
  EXPECT_EQ(laminar_segments(orbit, 0.1).segment_lengths, (std::vector<std::int64_t>{2, 1}));
  EXPECT_TRUE(std::isnan(laminar_segments(orbit, 0.1).tail_index));
  EXPECT_THROW(laminar_segments(orbit, 0.5), std::invalid_argument);
  EXPECT_THROW(laminar_segments(orbit, 0.0), std::invalid_argument);
}

TEST(Laminar, WeakChaosTailIndex) {
  const auto orbit = shape_orbit(PMParams(0.7), derive_seed(11, 0), 10'000'000);
  const auto s = laminar_segments(orbit, 0.1);
  EXPECT_NEAR(s.tail_index, 1.0 / 0.7, 0.15);
}

TEST(Laminar, LoopExcursions) {
  TrajectoryRecord r;
  r.dim = 2;
  const double xs[] = {0.5, 0.05, 0.05, 0.05, 0.4, 0.02, 0.6};
  for (int k = 0; k < 7; ++k) {
    r.steps.push_back(k);
    r.x.push_back(xs[k]);
    r.p.push_back(k);
    r.p.push_back(0.0);
  }
  const auto loops = laminar_loop_excursions(r, 0.1);
  ASSERT_EQ(loops.size(), 2u);
  EXPECT_EQ(loops[0].start, 1);
  EXPECT_EQ(loops[0].length, 3);
  EXPECT_DOUBLE_EQ(loops[0].max_radius, 3.0);
  EXPECT_EQ(laminar_loop_excursions(r, 0.1, 2).size(), 1u);
  EXPECT_NEAR(discrete_loop_bound(1.1, 0.1, 1.0), 1.2 / std::sin(0.5), 1e-15);
}

TEST(Laminar, LoopBoundHoldsForFrozenShape) {
  // With x frozen, the E(2) path is a closed polygon inscribed in a circle of
  // radius |v| / (2 sin(c0/2)); the discrete bound must dominate it.
  const double v = 1.1, c0 = 1.0;
  double px = 0, py = 0, th = 0, worst = 0;
  for (int n = 0; n < 10'000; ++n) {
    px += v * std::cos(th);
    py += v * std::sin(th);
    th += c0;
    worst = std::max(worst, std::hypot(px, py));
  }
  EXPECT_LE(worst, discrete_loop_bound(v, 0.0, c0));
  EXPECT_NEAR(worst, v / std::sin(c0 / 2), 1e-3);
}

// ---------------------------------------------------------------- correlations

TEST(Autocorr, ConstantSeriesIsUndefined) {
  std::vector<double> c(1000, 2.0);
  EXPECT_THROW(autocorrelation(c, 10, 1, 5), std::domain_error);
}

TEST(Autocorr, ShuffledOrbitIsUncorrelated) {
  auto orbit = shape_orbit(PMParams(0.7), derive_seed(5, 0), 200'000);
  oracle::Rng rng(1);
  std::shuffle(orbit.begin(), orbit.end(), rng);
  const auto a = autocorrelation(orbit, 100, 1, 100);
  const double band = 3.0 / std::sqrt(static_cast<double>(orbit.size()));
  EXPECT_EQ(a.rho[0], 1.0);
  for (std::size_t lag = 1; lag < a.rho.size(); ++lag) EXPECT_LT(std::abs(a.rho[lag]), band) << lag;
}

TEST(Autocorr, MatchesDirectSum) {
  const auto orbit = shape_orbit(PMParams(0.3), derive_seed(6, 0), 5000);
  const auto a = autocorrelation(orbit, 20, 1, 20);
  const double mean = std::accumulate(orbit.begin(), orbit.end(), 0.0) / orbit.size();
  double c0 = 0;
  for (double x : orbit) c0 += (x - mean) * (x - mean);
  c0 /= orbit.size();
  for (std::size_t lag : {1u, 7u, 20u}) {
    double s = 0;
    for (std::size_t i = 0; i + lag < orbit.size(); ++i) s += (orbit[i] - mean) * (orbit[i + lag] - mean);
    s /= static_cast<double>(orbit.size() - lag);
    EXPECT_NEAR(a.rho[lag], s / c0, 1e-10) << lag;
  }
}

TEST(Autocorr, WeakChaosPolynomialDecay) {
  // A single orbit is dominated by a few long laminar phases, so the
  // estimate pools several.
  AutocorrelationAccumulator acc(10'000);
  for (std::uint64_t i = 0; i < 16; ++i) acc.add(shape_orbit(PMParams(0.7), derive_seed(21, i), 2'000'000));
  const auto a = acc.result(100, 10'000);
  EXPECT_NEAR(a.decay_exponent, 1.0 / 0.7 - 1.0, 0.15);
}

// ---------------------------------------------------------------- normality

TEST(Normality, GaussianWalk) {
  const auto ps = oracle::gaussian_walk(1000, 1000, 1000, 4);
  EXPECT_LT(clt_normality(ps, 1000).max_ks(), 0.05);
  EXPECT_THROW(clt_normality(oracle::gaussian_walk(100, 10, 1, 4), 10), std::invalid_argument);
  EXPECT_THROW(clt_normality(ps, 999), std::invalid_argument);
}

TEST(Normality, StrongVersusWeakChaos) {
  for (double gamma : {0.2, 0.7}) {
    const auto e = run_ensemble(ensemble_config(GroupType::aniso, 1, gamma, 1000, 1'000'000));
    const auto paths = extract_paths(e, estimate_drift(e).c);
    const double ks = clt_normality(paths, 1'000'000).max_ks();
    if (gamma < 0.5) {
      EXPECT_LT(ks, 0.07);
    } else {
      EXPECT_GT(ks, 0.1);
    }
  }
}

TEST(Normality, KSDistanceOfExactQuantiles) {
  std::vector<double> q;
  for (int i = 1; i < 2000; ++i) {
    // Approximate normal quantiles via the inverse of erfc by bisection.
    const double p = i / 2000.0;
    double lo = -10, hi = 10;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    q.push_back(lo);
  }
  EXPECT_LT(ks_distance_normal(q), 0.002);
}

// ---------------------------------------------------------------- Birkhoff averages

TEST(Birkhoff, DoublingMapMean) {
  const auto b = birkhoff_average(PMParams(0.0), [](double x) { return x; }, 1, 10'000'000);
  EXPECT_NEAR(b.mean, 0.5, 4 * b.stderr_mean);
  EXPECT_LT(b.stderr_mean, 0.001);
}

TEST(Birkhoff, ShapeOrbitStartsAfterBurnIn) {
  const auto a = shape_orbit(PMParams(0.4), 9, 100, 50);
  ASSERT_EQ(a.size(), 100u);
  const auto b = shape_orbit(PMParams(0.4), 9, 150, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a[i], b[i + 50]);
}

// ---------------------------------------------------------------- classification

TEST(Classify, Bands) {
  EXPECT_EQ(classify(true, fake_fit(0.50, 0.01)), "drift+diffusive");
  EXPECT_EQ(classify(false, fake_fit(0.50, 0.01)), "diffusive");
  EXPECT_EQ(classify(false, fake_fit(0.70, 0.01)), "superdiffusive");
  EXPECT_EQ(classify(true, fake_fit(0.70, 0.01)), "drift+superdiffusive");
  EXPECT_EQ(classify(false, fake_fit(1.00, 0.01)), "ballistic");
  EXPECT_EQ(classify(false, fake_fit(0.02, 0.01)), "bounded");
  EXPECT_EQ(classify(true, fake_fit(0.02, 0.01)), "ballistic");
  EXPECT_EQ(classify(false, fake_fit(0.59, 0.01)), "inconclusive");
  EXPECT_EQ(classify(false, fake_fit(0.96, 0.01)), "inconclusive");
  EXPECT_EQ(classify(false, fake_fit(0.50, 0.06)), "inconclusive");
}
