#include <cmath>
#include <optional>
#include <stdexcept>

#include "skewflow/seeding.hpp"
#include "skewflow/stats.hpp"

namespace skewflow {
namespace {

/// Shape orbit source shared by the Birkhoff average and shape_orbit.
class ShapeOrbit {
 public:
  ShapeOrbit(const PMParams& params, std::uint64_t seed) : params_(params) {
    if (params.gamma() == 0.0) {
      doubling_.emplace(seed);
      x_ = doubling_->x();
    } else {
      x_ = sample_initial_condition(seed);
    }
  }
  double x() const noexcept { return x_; }
  void advance() {
    if (doubling_) {
      doubling_->advance();
      x_ = doubling_->x();
    } else {
      x_ = pm_step(x_, params_);
    }
  }

 private:
  PMParams params_;
  std::optional<DoublingOrbit> doubling_;
  double x_ = 0.0;
};

}  // namespace

BirkhoffEstimate birkhoff_average(const PMParams& params, const std::function<double(double)>& f,
                                  std::uint64_t seed, std::int64_t n, std::int64_t burn_in,
                                  int batches) {
  if (n < 1 || batches < 2 || n < batches) {
    throw std::invalid_argument("birkhoff_average: need n >= batches >= 2");
  }
  ShapeOrbit orbit(params, seed);
  for (std::int64_t k = 0; k < burn_in; ++k) orbit.advance();
  const std::int64_t per_batch = n / batches;
  double total = 0.0, sum_means = 0.0, sum_means_sq = 0.0;
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::int64_t k = 0; k < per_batch; ++k) {
      s += f(orbit.x());
      orbit.advance();
    }
    total += s;
    const double m = s / static_cast<double>(per_batch);
    sum_means += m;
    sum_means_sq += m * m;
  }
  BirkhoffEstimate out;
  out.n = per_batch * batches;
  out.mean = total / static_cast<double>(out.n);
  const double nb = batches;
  const double mm = sum_means / nb;
  const double var = std::max(0.0, (sum_means_sq - nb * mm * mm) / (nb - 1.0));
  out.stderr_mean = std::sqrt(var / nb);
  return out;
}

std::vector<double> shape_orbit(const PMParams& params, std::uint64_t seed, std::int64_t n,
                                std::int64_t burn_in) {
  if (n < 0 || burn_in < 0) throw std::invalid_argument("shape_orbit: negative length");
  ShapeOrbit orbit(params, seed);
  for (std::int64_t k = 0; k < burn_in; ++k) orbit.advance();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) {
    x = orbit.x();
    orbit.advance();
  }
  return out;
}

}  // namespace skewflow
