#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "skewflow/regular.hpp"
#include "skewflow/rotation.hpp"
#include "skewflow/steppers.hpp"

using namespace skewflow;
using std::numbers::pi;

namespace {

double max_abs_diff(const Mat3& a, const Mat3& b) {
  double m = 0.0;
  for (int i = 0; i < 9; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// R^T R - I computed independently of the library.
double gram_error(const Mat3& r) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r[k * 3 + i] * r[k * 3 + j];
      m = std::max(m, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  return m;
}

SkewProductState frozen_state(double x, std::size_t d, std::optional<RotationState> rot) {
  return SkewProductState{x, std::move(rot), std::vector<double>(d, 0.0)};
}

/// Observables for tests where x stays at the fixed point 0.
ObservableSpec spec_v(std::vector<double> v, std::vector<double> h) {
  ObservableSpec s;
  s.v = AffineField::constant(std::move(v));
  s.rotation_generator = AffineField::constant(std::move(h));
  return s;
}

}  // namespace

TEST(SO3Exp, ZeroIsIdentity) { EXPECT_EQ(so3_exp({0, 0, 0}), identity3()); }

TEST(SO3Exp, QuarterTurnAboutZ) {
  const Vec3 r = apply(so3_exp({0, 0, pi / 2}), {1, 0, 0});
  EXPECT_NEAR(r[0], 0.0, 1e-15);
  EXPECT_NEAR(r[1], 1.0, 1e-15);
  EXPECT_NEAR(r[2], 0.0, 1e-15);
}

TEST(SO3Exp, OrthogonalForRandomVectors) {
  oracle::Rng rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10'000; ++i) {
    Vec3 w{u(rng), u(rng), u(rng)};
    const double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    const double scale = pi * std::abs(u(rng)) / n;
    for (double& c : w) c *= scale;
    ASSERT_LT(gram_error(so3_exp(w)), 1e-14);
  }
}

TEST(SO3Exp, AgreesWithTaylorSeries) {
  const Vec3 w{0.3, -0.2, 0.5};
  // exp(K) summed directly, K the cross-product matrix of w.
  const Mat3 k{0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0};
  Mat3 term = identity3(), sum = identity3();
  for (int n = 1; n < 30; ++n) {
    term = multiply(term, k);
    for (double& t : term) t /= n;
    for (int i = 0; i < 9; ++i) sum[i] += term[i];
  }
  EXPECT_LT(max_abs_diff(sum, so3_exp(w)), 1e-15);
}

TEST(Renormalize, ExactRotationUnchanged) {
  const Mat3 r = so3_exp({0.4, 1.1, -0.7});
  EXPECT_LT(max_abs_diff(renormalize_rotation(r), r), 1e-15);
}

TEST(Renormalize, PerturbedIdentity) {
  Mat3 r = identity3();
  const double eps[9] = {0.3, -0.8, 0.1, 0.5, 0.9, -0.4, 0.2, 0.7, -0.6};
  for (int i = 0; i < 9; ++i) r[i] += 1e-6 * eps[i];
  EXPECT_LT(gram_error(renormalize_rotation(r)), 1e-14);
}

TEST(Renormalize, RejectsDegenerateInput) {
  Mat3 r = identity3();
  r[0] = 0.0;
  EXPECT_THROW(renormalize_rotation(r), std::domain_error);
  Mat3 flip = identity3();
  flip[8] = -1.0;
  EXPECT_THROW(renormalize_rotation(flip), std::domain_error);
}

TEST(Renormalize, LongProductStaysOrthogonal) {
  const Mat3 step = so3_exp({0.31, -0.17, 0.92});
  Mat3 r = identity3();
  for (int i = 1; i <= 1'000'000; ++i) {
    r = multiply(r, step);
    if (i % 1000 == 0) r = renormalize_rotation(r);
  }
  EXPECT_LE(gram_error(r), 1e-9);
}

TEST(ReduceAngle, Range) {
  for (double t : {-10.0, -kTwoPi, 0.0, 3.0, kTwoPi, 100.0}) {
    const double r = reduce_angle(t);
    EXPECT_GE(r, 0.0);
    EXPECT_LT(r, kTwoPi);
    EXPECT_NEAR(std::remainder(r - t, kTwoPi), 0.0, 1e-13);
  }
}

TEST(StepAniso, FixedPointContributesPhiZero) {
  ObservableSpec s;
  s.phi = AffineField::affine({1.0}, {1.0});
  const auto next = step_anisotropic(frozen_state(0.0, 1, std::nullopt), PMParams(0.7), s);
  EXPECT_EQ(next.p, std::vector<double>{1.0});
  EXPECT_EQ(next.x, 0.0);
}

TEST(StepAniso, ZeroObservable) {
  ObservableSpec s;
  s.phi = AffineField::constant({0.0, 0.0});
  SkewProductState st{0.37, std::nullopt, {2.5, -1.0}};
  EXPECT_EQ(step_anisotropic(st, PMParams(0.5), s).p, st.p);
}

TEST(StepAniso, DoublingOrbitSum) {
  ObservableSpec s;
  s.phi = AffineField::affine({1.0}, {1.0});
  SkewProductState st{0.3, std::nullopt, {0.0}};
  for (int i = 0; i < 3; ++i) st = step_anisotropic(st, PMParams(0.0), s);
  EXPECT_NEAR(st.p[0], 4.1, 1e-14);
}

TEST(StepE2, QuarterTurns) {
  const auto s = spec_v({1.0, 0.0}, {pi / 2});
  auto st = step_e2(frozen_state(0.0, 2, SO2{0.0}), PMParams(0.7), s);
  EXPECT_EQ(st.p, (std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(std::get<SO2>(*st.rot).theta, pi / 2);
  st = step_e2(st, PMParams(0.7), s);
  EXPECT_NEAR(st.p[0], 1.0, 1e-15);
  EXPECT_NEAR(st.p[1], 1.0, 1e-15);
}

TEST(StepE2, ZeroRotationMatchesAnisotropicBitwise) {
  ObservableSpec e2;
  e2.v = AffineField::affine({1.0, 0.0}, {1.0, 0.0});
  e2.rotation_generator = AffineField::constant({0.0});
  ObservableSpec an;
  an.phi = AffineField::affine({1.0}, {1.0});
  const PMParams params(0.7);
  SkewProductState a{0.123, std::nullopt, {0.0}};
  SkewProductState b{0.123, SO2{0.0}, {0.0, 0.0}};
  for (int i = 0; i < 10'000; ++i) {
    a = step_anisotropic(a, params, an);
    b = step_e2(b, params, e2);
    ASSERT_EQ(a.p[0], b.p[0]);
    ASSERT_EQ(b.p[1], 0.0);
  }
}

TEST(StepE3, NoRotation) {
  auto st = frozen_state(0.0, 3, SO3{});
  const auto s = spec_v({1, 0, 0}, {0, 0, 0});
  for (int i = 0; i < 7; ++i) st = step_e3(st, PMParams(0.7), s);
  EXPECT_EQ(st.p, (std::vector<double>{7, 0, 0}));
}

TEST(StepE3, FullTurnCancels) {
  auto st = frozen_state(0.0, 3, SO3{});
  const auto s = spec_v({1, 0, 0}, {0, 0, pi / 2});
  for (int i = 0; i < 4; ++i) st = step_e3(st, PMParams(0.7), s);
  for (double v : st.p) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(StepE3, AxisComponentUnaffected) {
  auto st = frozen_state(0.0, 3, SO3{});
  const auto s = spec_v({0, 0, 1}, {0, 0, pi / 2});
  for (int i = 0; i < 100; ++i) st = step_e3(st, PMParams(0.7), s);
  EXPECT_NEAR(st.p[0], 0.0, 1e-13);
  EXPECT_NEAR(st.p[1], 0.0, 1e-13);
  EXPECT_NEAR(st.p[2], 100.0, 1e-12);
}

TEST(Steppers, RejectMismatches) {
  ObservableSpec s = spec_v({1, 0, 0}, {0, 0, 1});
  EXPECT_THROW(step_e3(frozen_state(0.1, 2, SO3{}), PMParams(0.5), s), std::invalid_argument);
  EXPECT_THROW(step_e3(frozen_state(0.1, 3, SO2{}), PMParams(0.5), s), std::invalid_argument);
}

TEST(RegularEven, ZeroVelocity) {
  const double w[] = {1.0};
  const std::complex<double> v[] = {0.0};
  for (double t : {0.0, 1.0, 17.5}) EXPECT_EQ(std::abs(regular_translation_even(w, v, t)[0]), 0.0);
}

TEST(RegularEven, ClosedCircleAndBound) {
  const double w[] = {1.0};
  const std::complex<double> v[] = {1.0};
  EXPECT_LT(std::abs(regular_translation_even(w, v, 2 * pi)[0]), 1e-15);
  double sup = 0.0;
  for (int i = 0; i <= 100'000; ++i) sup = std::max(sup, std::abs(regular_translation_even(w, v, 2 * pi * i / 1e5)[0]));
  EXPECT_NEAR(sup, 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(regular_even_bound(w, v), 2.0);
}

TEST(RegularEven, MatchesDiscreteSumLimit) {
  // p(t) = integral_0^t e^{i w s} v ds, approximated by a midpoint sum.
  const double w[] = {0.7, -1.3};
  const std::complex<double> v[] = {{1.0, 0.5}, {-0.2, 2.0}};
  const double t = 5.3;
  const int n = 200'000;
  for (int j = 0; j < 2; ++j) {
    std::complex<double> sum = 0.0;
    for (int k = 0; k < n; ++k) sum += std::exp(std::complex<double>(0, w[j] * (k + 0.5) * t / n)) * v[j];
    sum *= t / n;
    EXPECT_LT(std::abs(sum - regular_translation_even(w, v, t)[j]), 1e-8);
  }
  EXPECT_THROW(regular_translation_even(std::vector<double>{0.0}, std::vector<std::complex<double>>{1.0}, 1.0),
               std::domain_error);
}

TEST(RegularOdd, Corkscrew) {
  const double w[] = {1.0};
  const std::complex<double> v[] = {1.0};
  const auto zero = regular_translation_odd(0.0, w, std::vector<std::complex<double>>{0.0}, 3.0);
  EXPECT_EQ(zero.axial, 0.0);
  EXPECT_EQ(std::abs(zero.transverse[0]), 0.0);
  EXPECT_EQ(regular_translation_odd(2.0, w, v, 10.0).axial, 20.0);
  for (int i = 0; i <= 10'000; ++i) {
    const double t = 0.01 * i;
    const auto p = regular_translation_odd(1.0, w, v, t);
    ASSERT_EQ(p.axial, t);
    ASSERT_LE(std::abs(p.transverse[0]), 2.0 + 1e-12);
  }
}
