#pragma once

#include <complex>
#include <span>
#include <vector>

namespace skewflow {

/// Translation path for an equilibrium shape state in dimension d = 2q, in
/// coordinates where the rotation generator is block diagonal with rates
/// omega_j and R^d is identified with C^q:
///
///   p_j(t) = (e^{i t omega_j} - 1) / (i omega_j) * v_j,   p(0) = 0.
///
/// Each block traces a circle through the origin, so
/// |p(t)| <= 2 sum_j |v_j| / |omega_j| for all t. Throws std::domain_error if
/// any omega_j == 0 and std::invalid_argument on a size mismatch.
std::vector<std::complex<double>> regular_translation_even(std::span<const double> omegas,
                                                           std::span<const std::complex<double>> v,
                                                           double t);

/// The analytic bound 2 sum_j |v_j| / |omega_j|.
double regular_even_bound(std::span<const double> omegas, std::span<const std::complex<double>> v);

struct OddPath {
  double axial = 0.0;
  std::vector<std::complex<double>> transverse;
};

/// Dimension d = 2q + 1: the component along the rotation axis drifts
/// linearly (v_axial t) while the remaining q complex components follow
/// regular_translation_even.
OddPath regular_translation_odd(double v_axial, std::span<const double> omegas,
                                std::span<const std::complex<double>> v_rot, double t);

}  // namespace skewflow
