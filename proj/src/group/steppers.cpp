#include "skewflow/steppers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skewflow {
namespace {

constexpr double kReorthonormalizeAbove = 1e-10;

void require_dim(const SkewProductState& s, std::size_t d, const char* who) {
  if (s.p.size() != d) {
    throw std::invalid_argument(std::string(who) + ": state has dimension " +
                                std::to_string(s.p.size()) + ", expected " + std::to_string(d));
  }
}

void require_field(const AffineField& f, std::size_t d, const char* who, const char* name) {
  if (f.dim() != d) {
    throw std::invalid_argument(std::string(who) + ": " + name + " has " + std::to_string(f.dim()) +
                                " components, expected " + std::to_string(d));
  }
}

}  // namespace

SkewProductState step_anisotropic(const SkewProductState& state, const PMParams& params,
                                  const ObservableSpec& spec) {
  if (state.rot) throw std::invalid_argument("step_anisotropic: state carries a rotation");
  require_field(spec.phi, state.p.size(), "step_anisotropic", "phi");
  const std::vector<double> phi = spec.phi(state.x);
  SkewProductState next = state;
  for (std::size_t i = 0; i < phi.size(); ++i) next.p[i] = state.p[i] + phi[i];
  next.x = pm_step(state.x, params);
  return next;
}

SkewProductState step_e2(const SkewProductState& state, const PMParams& params,
                         const ObservableSpec& spec) {
  if (!state.rot || !std::holds_alternative<SO2>(*state.rot)) {
    throw std::invalid_argument("step_e2: state rotation is not SO(2)");
  }
  require_dim(state, 2, "step_e2");
  require_field(spec.v, 2, "step_e2", "v");
  require_field(spec.rotation_generator, 1, "step_e2", "rotation rate");

  const double theta = std::get<SO2>(*state.rot).theta;
  const std::vector<double> v = spec.v(state.x);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  SkewProductState next = state;
  next.p[0] = state.p[0] + std::fma(c, v[0], -(s * v[1]));
  next.p[1] = state.p[1] + std::fma(s, v[0], c * v[1]);
  next.rot = SO2{reduce_angle(theta + spec.rotation_generator(state.x)[0])};
  next.x = pm_step(state.x, params);
  return next;
}

SkewProductState step_e3(const SkewProductState& state, const PMParams& params,
                         const ObservableSpec& spec) {
  if (!state.rot || !std::holds_alternative<SO3>(*state.rot)) {
    throw std::invalid_argument("step_e3: state rotation is not SO(3)");
  }
  require_dim(state, 3, "step_e3");
  require_field(spec.v, 3, "step_e3", "v");
  require_field(spec.rotation_generator, 3, "step_e3", "angular velocity");

  const Mat3& a = std::get<SO3>(*state.rot).r;
  const std::vector<double> v = spec.v(state.x);
  const std::vector<double> w = spec.rotation_generator(state.x);
  const Vec3 dp = apply(a, Vec3{v[0], v[1], v[2]});

  SkewProductState next = state;
  for (int i = 0; i < 3; ++i) next.p[i] = state.p[i] + dp[i];
  Mat3 a_next = multiply(a, so3_exp(Vec3{w[0], w[1], w[2]}));
  if (orthogonality_error(a_next) > kReorthonormalizeAbove) {
    a_next = renormalize_rotation(a_next);
  }
  next.rot = SO3{a_next};
  next.x = pm_step(state.x, params);
  return next;
}

}  // namespace skewflow
