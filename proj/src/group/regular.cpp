#include "skewflow/regular.hpp"

#include <cmath>
#include <stdexcept>

namespace skewflow {

std::vector<std::complex<double>> regular_translation_even(std::span<const double> omegas,
                                                           std::span<const std::complex<double>> v,
                                                           double t) {
  if (omegas.size() != v.size()) {
    throw std::invalid_argument("regular_translation_even: rates and velocities differ in size");
  }
  std::vector<std::complex<double>> p(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double w = omegas[j];
    if (w == 0.0) {
      throw std::domain_error("regular_translation_even: zero rotation rate (axis-type block)");
    }
    // (e^{i s} - 1) / (i w) = (sin s + i (1 - cos s)) / w, with 1 - cos s = 2 sin^2(s/2)
    const double s = t * w;
    const double h = std::sin(0.5 * s);
    const std::complex<double> kernel(std::sin(s) / w, 2.0 * h * h / w);
    p[j] = kernel * v[j];
  }
  return p;
}

double regular_even_bound(std::span<const double> omegas, std::span<const std::complex<double>> v) {
  double bound = 0.0;
  for (std::size_t j = 0; j < v.size() && j < omegas.size(); ++j) {
    bound += 2.0 * std::abs(v[j]) / std::abs(omegas[j]);
  }
  return bound;
}

OddPath regular_translation_odd(double v_axial, std::span<const double> omegas,
                                std::span<const std::complex<double>> v_rot, double t) {
  return OddPath{v_axial * t, regular_translation_even(omegas, v_rot, t)};
}

}  // namespace skewflow
