#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "skewflow/stats.hpp"

namespace skewflow {
namespace {

// FFTW planning is not thread safe; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

AutocorrelationAccumulator::AutocorrelationAccumulator(std::size_t max_lag)
    : max_lag_(max_lag), sums_(max_lag + 1, 0.0), counts_(max_lag + 1, 0.0) {
  if (max_lag == 0) throw std::invalid_argument("autocorrelation: max_lag must be positive");
}

void AutocorrelationAccumulator::add(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10 * max_lag_) {
    throw std::invalid_argument("autocorrelation: series length " + std::to_string(n) +
                                " is below 10 * max_lag");
  }
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  // Each block of B points is correlated with itself extended by max_lag
  // points, so every pair (i, i + lag) with i in the block is counted once.
  const std::size_t block = std::max<std::size_t>(next_pow2(8 * max_lag_), 1 << 14);
  const std::size_t nfft = next_pow2(block + max_lag_);
  const std::size_t nc = nfft / 2 + 1;

  std::unique_ptr<double, FftwFree> a(fftw_alloc_real(nfft));
  std::unique_ptr<double, FftwFree> b(fftw_alloc_real(nfft));
  std::unique_ptr<fftw_complex, FftwFree> fa(fftw_alloc_complex(nc));
  std::unique_ptr<fftw_complex, FftwFree> fb(fftw_alloc_complex(nc));
  fftw_plan forward, backward;
  {
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), a.get(), fa.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(nfft), fb.get(), b.get(), FFTW_ESTIMATE);
  }

  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t len_a = std::min(block, n - start);
    const std::size_t len_b = std::min(block + max_lag_, n - start);
    std::fill(a.get(), a.get() + nfft, 0.0);
    for (std::size_t i = 0; i < len_a; ++i) a.get()[i] = series[start + i] - mean;
    fftw_execute_dft_r2c(forward, a.get(), fa.get());
    std::fill(a.get(), a.get() + nfft, 0.0);
    for (std::size_t i = 0; i < len_b; ++i) a.get()[i] = series[start + i] - mean;
    fftw_execute_dft_r2c(forward, a.get(), fb.get());
    for (std::size_t k = 0; k < nc; ++k) {
      const std::complex<double> x(fa.get()[k][0], fa.get()[k][1]);
      const std::complex<double> y(fb.get()[k][0], fb.get()[k][1]);
      const std::complex<double> z = std::conj(x) * y;
      fb.get()[k][0] = z.real();
      fb.get()[k][1] = z.imag();
    }
    fftw_execute_dft_c2r(backward, fb.get(), b.get());
    for (std::size_t lag = 0; lag <= max_lag_; ++lag) {
      sums_[lag] += b.get()[lag] / static_cast<double>(nfft);
    }
  }
  for (std::size_t lag = 0; lag <= max_lag_; ++lag) counts_[lag] += static_cast<double>(n - lag);

  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward);
  fftw_destroy_plan(backward);
}

Autocorrelation AutocorrelationAccumulator::result(std::int64_t fit_lo, std::int64_t fit_hi) const {
  if (!(counts_[0] > 0.0)) throw std::invalid_argument("autocorrelation: no data");
  const double c0 = sums_[0] / counts_[0];
  if (!(c0 > 1e-300)) throw std::domain_error("autocorrelation: zero variance");
  Autocorrelation out;
  out.n_values = static_cast<std::size_t>(counts_[0]);
  out.rho.resize(max_lag_ + 1);
  for (std::size_t lag = 0; lag <= max_lag_; ++lag) out.rho[lag] = sums_[lag] / counts_[lag] / c0;

  out.fit_lo = std::max<std::int64_t>(1, fit_lo);
  out.fit_hi = std::min<std::int64_t>(static_cast<std::int64_t>(max_lag_), fit_hi);
  std::vector<double> lx, ly;
  std::int64_t last = 0;
  for (int i = 0;; ++i) {
    const auto lag = static_cast<std::int64_t>(
        std::llround(static_cast<double>(out.fit_lo) * std::pow(10.0, i / 20.0)));
    if (lag > out.fit_hi) break;
    if (lag == last) continue;
    last = lag;
    const double r = out.rho[static_cast<std::size_t>(lag)];
    if (r > 0.0) {
      lx.push_back(std::log(static_cast<double>(lag)));
      ly.push_back(std::log(r));
    }
  }
  if (lx.size() >= 3) {
    const LineFit f = fit_line(lx, ly);
    out.decay_exponent = -f.slope;
    out.decay_stderr = f.slope_stderr;
    out.r_squared = f.r_squared;
  } else {
    out.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    out.decay_stderr = std::numeric_limits<double>::quiet_NaN();
    out.r_squared = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

Autocorrelation autocorrelation(std::span<const double> series, std::size_t max_lag,
                                std::int64_t fit_lo, std::int64_t fit_hi) {
  AutocorrelationAccumulator acc(max_lag);
  acc.add(series);
  return acc.result(fit_lo, fit_hi);
}

}  // namespace skewflow
