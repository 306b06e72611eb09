#include "skewflow/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skewflow {

std::string_view to_string(GroupType g) noexcept {
  switch (g) {
    case GroupType::aniso: return "aniso";
    case GroupType::e2: return "e2";
    case GroupType::e3: return "e3";
    case GroupType::regular_even: return "regular_even";
    case GroupType::regular_odd: return "regular_odd";
  }
  return "?";
}

std::string_view to_string(KernelChoice k) noexcept {
  switch (k) {
    case KernelChoice::automatic: return "auto";
    case KernelChoice::avx512: return "avx512";
    case KernelChoice::avx2: return "avx2";
    case KernelChoice::scalar: return "scalar";
    case KernelChoice::reference: return "reference";
  }
  return "?";
}

std::optional<GroupType> parse_group(std::string_view s) noexcept {
  for (GroupType g : {GroupType::aniso, GroupType::e2, GroupType::e3, GroupType::regular_even,
                      GroupType::regular_odd}) {
    if (s == to_string(g)) return g;
  }
  return std::nullopt;
}

std::optional<KernelChoice> parse_kernel(std::string_view s) noexcept {
  for (KernelChoice k : {KernelChoice::automatic, KernelChoice::avx512, KernelChoice::avx2,
                         KernelChoice::scalar, KernelChoice::reference}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

ObservableSpec default_observables(GroupType group, std::size_t dim) {
  ObservableSpec spec;
  const std::vector<double> ones(dim, 1.0);
  spec.phi = AffineField::affine(ones, ones);
  switch (group) {
    case GroupType::aniso:
      spec.v = AffineField::affine(ones, ones);
      spec.rotation_generator = AffineField::constant({0.0});
      break;
    case GroupType::e2:
      spec.v = AffineField::affine({1.0, 0.0}, {1.0, 0.0});
      spec.rotation_generator = AffineField::constant({1.0});
      break;
    case GroupType::e3: {
      const double n = 1.0 / std::sqrt(3.0);
      const double m = 2.0 / std::sqrt(2.0);
      spec.v = AffineField::affine({1.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
      spec.rotation_generator = AffineField::affine({n, n, n}, {m, -m, 0.0});
      break;
    }
    case GroupType::regular_even: {
      std::vector<double> re(dim, 0.0);
      for (std::size_t j = 0; j < dim; j += 2) re[j] = 1.0;
      spec.v = AffineField::affine(re, re);
      spec.rotation_generator = AffineField::constant(std::vector<double>(dim / 2, 1.0));
      break;
    }
    case GroupType::regular_odd: {
      std::vector<double> w(dim, 0.0);
      w[0] = 1.0;
      if (dim > 1) w[1] = 1.0;
      spec.v = AffineField::affine(w, w);
      spec.rotation_generator = AffineField::constant(std::vector<double>(dim / 2, 1.0));
      break;
    }
  }
  return spec;
}

void validate(const SimulationConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (c.n_steps < 0) fail("n_steps must be >= 0");
  if (c.n_traj < 1) fail("n_traj must be >= 1");
  if (c.burn_in < 0) fail("burn_in must be >= 0");
  if (c.record_stride < 1) fail("record_stride must be >= 1");
  const std::size_t d = c.dim;
  auto need = [&](const AffineField& f, std::size_t n, const char* name) {
    if (f.a.size() != n || f.b.size() != n) {
      fail(std::string(name) + " must have " + std::to_string(n) + " components for group " +
           std::string(to_string(c.group)));
    }
  };
  switch (c.group) {
    case GroupType::aniso:
      if (d < 1) fail("dim must be >= 1 for group aniso");
      need(c.spec.phi, d, "phi");
      break;
    case GroupType::e2:
      if (d != 2) fail("dim must be 2 for group e2");
      need(c.spec.v, 2, "v");
      need(c.spec.rotation_generator, 1, "rotation generator");
      break;
    case GroupType::e3:
      if (d != 3) fail("dim must be 3 for group e3");
      need(c.spec.v, 3, "v");
      need(c.spec.rotation_generator, 3, "rotation generator");
      break;
    case GroupType::regular_even:
      if (d < 2 || d % 2 != 0) fail("dim must be even and >= 2 for group regular_even");
      need(c.spec.v, d, "v");
      need(c.spec.rotation_generator, d / 2, "rotation generator");
      break;
    case GroupType::regular_odd:
      if (d < 3 || d % 2 != 1) fail("dim must be odd and >= 3 for group regular_odd");
      need(c.spec.v, d, "v");
      need(c.spec.rotation_generator, d / 2, "rotation generator");
      break;
  }
  if (c.record_axis && c.group != GroupType::e3) fail("record_axis applies to group e3 only");
}

std::int64_t samples_per_trajectory(const SimulationConfig& c) noexcept {
  return c.n_steps / c.record_stride + 1;
}

bool drift_vanishes_by_symmetry(GroupType g) noexcept {
  return g == GroupType::e2 || g == GroupType::e3;
}

}  // namespace skewflow
