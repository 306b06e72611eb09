#pragma once

#include <cstdint>
#include <vector>

namespace skewflow {

/// Which formula applies at exactly x = 1/2, where the two branches overlap.
enum class HalfBranch { left, right };

/// Parameters of the Pomeau-Manneville intermittency map
///
///   f(x) = x (1 + 2^g x^g)   for x < 1/2
///   f(x) = 2x - 1            for x > 1/2
///
/// with g in [0, 1). At x = 1/2 the left branch gives 1 and the right branch
/// gives 0; `branch_at_half` fixes which one is used. g = 0 is the doubling map.
class PMParams {
 public:
  /// Throws std::domain_error("gamma out of range [0,1)") for g outside [0, 1).
  explicit PMParams(double gamma, HalfBranch branch_at_half = HalfBranch::right);

  double gamma() const noexcept { return gamma_; }
  HalfBranch branch_at_half() const noexcept { return branch_; }
  /// 2^gamma, evaluated once.
  double two_pow_gamma() const noexcept { return two_pow_gamma_; }
  /// gamma < 1/2: summable correlation decay.
  bool strongly_chaotic() const noexcept { return gamma_ < 0.5; }

  friend bool operator==(const PMParams&, const PMParams&) = default;

 private:
  double gamma_;
  HalfBranch branch_;
  double two_pow_gamma_;
};

/// One application of the map. Throws std::domain_error for x outside [0, 1].
double pm_step(double x, const PMParams& params);

/// The orbit x0, f(x0), ..., f^n(x0) (n + 1 values).
std::vector<double> pm_orbit(double x0, std::int64_t n, const PMParams& params);

}  // namespace skewflow
