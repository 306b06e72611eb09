#pragma once

#include <cstdint>

namespace skewflow {

/// The SplitMix64 output finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 generator: state += golden gamma, output = mix(state).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t operator()() noexcept {
    state_ += kGoldenGamma;
    return splitmix64_mix(state_);
  }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }
  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Per-trajectory seed: mix(base_seed ^ ((index + 1) * golden gamma)).
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return splitmix64_mix(base_seed ^ ((index + 1) * kGoldenGamma));
}

inline constexpr double kInitialConditionFloor = 1e-12;

/// Draws u = (next() >> 11) * 2^-53 from `gen`, rejecting u <= 1e-12.
/// The result lies in (1e-12, 1) on the 2^-53 grid.
double draw_initial_condition(SplitMix64& gen) noexcept;

/// draw_initial_condition on a fresh SplitMix64 seeded with `seed`.
double sample_initial_condition(std::uint64_t seed) noexcept;

/// Exact orbit of the doubling map x -> 2x mod 1 for the real number whose
/// first 53 binary digits are those of the sampled initial condition and
/// whose remaining digits are drawn from the same generator stream. A
/// binary64 orbit of the doubling map loses one digit per step and reaches 0
/// after about 53 steps; shifting a digit window avoids that.
class DoublingOrbit {
 public:
  /// Consumes the initial-condition draw from SplitMix64(seed).
  explicit DoublingOrbit(std::uint64_t seed) noexcept;

  /// Current point: the first 53 digits of the window, exact in binary64.
  double x() const noexcept { return static_cast<double>(window_ >> 11) * 0x1p-53; }
  void advance() noexcept;

 private:
  SplitMix64 gen_;
  std::uint64_t window_ = 0;
  std::uint64_t reservoir_ = 0;
  int reservoir_bits_ = 0;
};

}  // namespace skewflow
