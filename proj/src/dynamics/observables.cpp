#include "skewflow/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace skewflow {

AffineField AffineField::constant(std::vector<double> a) {
  std::vector<double> b(a.size(), 0.0);
  return AffineField{std::move(a), std::move(b)};
}

AffineField AffineField::affine(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("affine field: offset has " + std::to_string(a.size()) +
                                " components but slope has " + std::to_string(b.size()));
  }
  return AffineField{std::move(a), std::move(b)};
}

bool AffineField::is_constant() const noexcept {
  return std::all_of(b.begin(), b.end(), [](double s) { return s == 0.0; });
}

bool AffineField::is_zero() const noexcept {
  return is_constant() && std::all_of(a.begin(), a.end(), [](double s) { return s == 0.0; });
}

std::vector<double> AffineField::operator()(double x) const {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = std::fma(b[i], x, a[i]);
  }
  return out;
}

double AffineField::sup_norm(double lo, double hi) const {
  auto norm = [](const std::vector<double>& w) {
    double s = 0.0;
    for (double c : w) s += c * c;
    return std::sqrt(s);
  };
  // The norm of an affine map is convex in x.
  return std::max(norm((*this)(lo)), norm((*this)(hi)));
}

std::vector<double> eval_observable(const ObservableSpec& spec, ObservableKind which, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("eval_observable: x outside [0,1]: " + std::to_string(x));
  }
  switch (which) {
    case ObservableKind::phi:
      return spec.phi(x);
    case ObservableKind::v:
      return spec.v(x);
    case ObservableKind::h:
      return spec.rotation_generator(x);
  }
  return {};
}

}  // namespace skewflow
