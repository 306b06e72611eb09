#pragma once

#include <cstddef>
#include <vector>

namespace skewflow {

/// Componentwise affine function x -> a + b x on [0, 1].
struct AffineField {
  std::vector<double> a;
  std::vector<double> b;

  static AffineField constant(std::vector<double> a);
  /// a + b x with a, b given componentwise. Throws on size mismatch.
  static AffineField affine(std::vector<double> a, std::vector<double> b);

  std::size_t dim() const noexcept { return a.size(); }
  bool is_constant() const noexcept;
  bool is_zero() const noexcept;
  /// Evaluates with fused multiply-add, fma(b, x, a), per component.
  std::vector<double> operator()(double x) const;
  /// max over x in [lo, hi] of the Euclidean norm (attained at an endpoint).
  double sup_norm(double lo = 0.0, double hi = 1.0) const;

  friend bool operator==(const AffineField&, const AffineField&) = default;
};

enum class ObservableKind { phi, v, h };

/// The functions that drive the group dynamics from the shape variable x.
///
/// phi: translation velocity for the anisotropic (R^d) skew product.
/// v:   body-frame translation velocity for the Euclidean skew products;
///      R^2 is identified with C for E(2).
/// rotation_generator (returned for ObservableKind::h): a rate in rad/step
///      for E(2) and the regular groups, an angular-velocity vector for E(3).
struct ObservableSpec {
  AffineField phi;
  AffineField v;
  AffineField rotation_generator;

  friend bool operator==(const ObservableSpec&, const ObservableSpec&) = default;
};

/// Evaluates one of the configured functions at x. Throws std::domain_error
/// for x outside [0, 1].
std::vector<double> eval_observable(const ObservableSpec& spec, ObservableKind which, double x);

}  // namespace skewflow
