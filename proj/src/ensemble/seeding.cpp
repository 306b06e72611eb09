#include "skewflow/seeding.hpp"

namespace skewflow {
namespace {

std::uint64_t draw_grid_point(SplitMix64& gen) noexcept {
  for (;;) {
    const std::uint64_t k = gen() >> 11;
    if (static_cast<double>(k) * 0x1p-53 > kInitialConditionFloor) return k;
  }
}

}  // namespace

double draw_initial_condition(SplitMix64& gen) noexcept {
  return static_cast<double>(draw_grid_point(gen)) * 0x1p-53;
}

double sample_initial_condition(std::uint64_t seed) noexcept {
  SplitMix64 gen(seed);
  return draw_initial_condition(gen);
}

DoublingOrbit::DoublingOrbit(std::uint64_t seed) noexcept : gen_(seed) {
  const std::uint64_t lead = draw_grid_point(gen_);
  window_ = (lead << 11) | (gen_() >> 53);
}

void DoublingOrbit::advance() noexcept {
  if (reservoir_bits_ == 0) {
    reservoir_ = gen_();
    reservoir_bits_ = 64;
  }
  window_ = (window_ << 1) | (reservoir_ >> 63);
  reservoir_ <<= 1;
  --reservoir_bits_;
}

}  // namespace skewflow
