#pragma once

// Trajectory kernel written once against the Vec interface. Lane l of the
// batch is an independent trajectory; U vectors are advanced together so
// that the long dependency chain of one map step overlaps with the others.
//
// Included by the backend translation units after the ISA wrapper and
// vmath.hpp, inside their target regions. Uses no standard library
// templates.

#include "kernel_api.hpp"
#include "skewflow/seeding.hpp"

namespace skewflow::kernels {

template <class V, int U>
struct BatchRunner {
  static constexpr int W = V::kLanes;
  static constexpr int L = W * U;
  static constexpr int kMaxDim = 16;

  const KernelPlan& plan;
  LaneIO* lanes;
  int count;
  alignas(64) double buf[L];

  int source(int l) const { return l < count ? l : count - 1; }

  void gather_x0(V* x) {
    for (int l = 0; l < L; ++l) buf[l] = lanes[source(l)].x0;
    for (int u = 0; u < U; ++u) x[u] = V::load(buf + u * W);
  }

  void gather_orbits(V* x) {
    for (int l = 0; l < L; ++l) buf[l] = lanes[source(l)].orbit->x();
    for (int u = 0; u < U; ++u) x[u] = V::load(buf + u * W);
  }

  template <bool Doubling>
  void advance_shape(V* x, V gamma, V tpg) {
    if constexpr (Doubling) {
      for (int l = 0; l < count; ++l) lanes[l].orbit->advance();
      gather_orbits(x);
    } else {
      for (int u = 0; u < U; ++u) x[u] = vpm_step(x[u], gamma, tpg, plan.branch_left);
    }
  }

  /// Writes vectors vs[0..U) to lanes' member array at `offset`, or to
  /// rotation_error when member is null.
  void scatter(const V* vs, double* LaneIO::*member, std::int64_t offset) {
    for (int u = 0; u < U; ++u) vs[u].store(buf + u * W);
    for (int l = 0; l < count; ++l) {
      if (member) {
        (lanes[l].*member)[offset] = buf[l];
      } else {
        lanes[l].rotation_error = buf[l];
      }
    }
  }

  static V orthogonality_error(V (&a)[9][U], int u) {
    V worst = V::broadcast(0.0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        V g = a[i][u] * a[j][u] + a[3 + i][u] * a[3 + j][u] + a[6 + i][u] * a[6 + j][u];
        if (i == j) g = g - V::broadcast(1.0);
        const V mag = select(g < V::broadcast(0.0), neg(g), g);
        worst = select(mag > worst, mag, worst);
      }
    }
    return worst;
  }

  template <PlanGroup G, bool Doubling>
  void run() {
    const V gamma = V::broadcast(plan.gamma);
    const V tpg = V::broadcast(plan.two_pow_gamma);
    const std::size_t dim = plan.dim;
    const std::int64_t samples = plan.n_steps / plan.stride + 1;

    V x[U];
    if constexpr (Doubling) {
      for (std::int64_t k = 0; k < plan.burn_in; ++k) {
        for (int l = 0; l < count; ++l) lanes[l].orbit->advance();
      }
      gather_orbits(x);
    } else {
      gather_x0(x);
      for (std::int64_t k = 0; k < plan.burn_in; ++k) advance_shape<false>(x, gamma, tpg);
    }

    V fa[kMaxDim], fb[kMaxDim];
    for (std::size_t k = 0; k < dim; ++k) {
      fa[k] = V::broadcast(plan.field_a[k]);
      fb[k] = V::broadcast(plan.field_b[k]);
    }
    V ra[3], rb[3];
    const int rot_dim = G == PlanGroup::e3 ? 3 : (G == PlanGroup::e2 ? 1 : 0);
    for (int k = 0; k < rot_dim; ++k) {
      ra[k] = V::broadcast(plan.rot_a[k]);
      rb[k] = V::broadcast(plan.rot_b[k]);
    }

    const V zero = V::broadcast(0.0);
    const V one = V::broadcast(1.0);
    V p[kMaxDim][U];
    for (std::size_t k = 0; k < dim; ++k) {
      for (int u = 0; u < U; ++u) p[k][u] = zero;
    }
    V theta[U];
    V a[9][U];
    V q[3][U];
    for (int u = 0; u < U; ++u) {
      theta[u] = zero;
      for (int k = 0; k < 9; ++k) a[k][u] = (k % 4 == 0) ? one : zero;
      for (int k = 0; k < 3; ++k) q[k][u] = zero;
    }

    auto record = [&](std::int64_t s) {
      for (std::size_t k = 0; k < dim; ++k) {
        scatter(p[k], &LaneIO::p, s * static_cast<std::int64_t>(dim) + static_cast<std::int64_t>(k));
      }
      if (plan.record_x) scatter(x, &LaneIO::x, s);
      if (plan.record_axis) {
        for (int k = 0; k < 3; ++k) scatter(q[k], &LaneIO::axis, s * 3 + k);
      }
    };

    record(0);
    std::int64_t step = 0;
    for (std::int64_t s = 1; s < samples; ++s) {
      for (std::int64_t j = 0; j < plan.stride; ++j) {
        ++step;
        if constexpr (G == PlanGroup::aniso) {
          for (std::size_t k = 0; k < dim; ++k) {
            for (int u = 0; u < U; ++u) p[k][u] = p[k][u] + fma(fb[k], x[u], fa[k]);
          }
        } else if constexpr (G == PlanGroup::e2) {
          for (int u = 0; u < U; ++u) {
            V sn, cs;
            vsincos(theta[u], sn, cs);
            const V vr = fma(fb[0], x[u], fa[0]);
            const V vi = fma(fb[1], x[u], fa[1]);
            p[0][u] = p[0][u] + fma(cs, vr, neg(sn * vi));
            p[1][u] = p[1][u] + fma(sn, vr, cs * vi);
            theta[u] = vreduce_angle(theta[u] + fma(rb[0], x[u], ra[0]));
          }
        } else {
          for (int u = 0; u < U; ++u) e3_step(a, p, q, x[u], u, fa, fb, ra, rb);
          if (step % plan.renorm_interval == 0) {
            for (int u = 0; u < U; ++u) bjorck(a, u);
          }
        }
        advance_shape<Doubling>(x, gamma, tpg);
      }
      record(s);
    }

    if constexpr (G == PlanGroup::e3) {
      V err[U];
      for (int u = 0; u < U; ++u) err[u] = orthogonality_error(a, u);
      scatter(err, nullptr, 0);
    }
    if constexpr (Doubling) {
      for (int l = 0; l < count; ++l) lanes[l].hit_exact_zero = lanes[l].orbit->x() == 0.0;
    } else {
      for (int u = 0; u < U; ++u) x[u].store(buf + u * W);
      for (int l = 0; l < count; ++l) lanes[l].hit_exact_zero = buf[l] == 0.0;
    }
  }

  void e3_step(V (&a)[9][U], V (&p)[kMaxDim][U], V (&q)[3][U], V xv, int u, const V* fa,
               const V* fb, const V* ra, const V* rb) {
    const V v0 = fma(fb[0], xv, fa[0]);
    const V v1 = fma(fb[1], xv, fa[1]);
    const V v2 = fma(fb[2], xv, fa[2]);
    const V wx = fma(rb[0], xv, ra[0]);
    const V wy = fma(rb[1], xv, ra[1]);
    const V wz = fma(rb[2], xv, ra[2]);

    V d[3];
    for (int i = 0; i < 3; ++i) {
      d[i] = a[3 * i][u] * v0 + a[3 * i + 1][u] * v1 + a[3 * i + 2][u] * v2;
      p[i][u] = p[i][u] + d[i];
    }

    const V theta2 = wx * wx + wy * wy + wz * wz;
    const V theta = sqrt(theta2);
    const auto tiny = theta < V::broadcast(1e-30);

    if (plan.record_axis) {
      const V inv = select(tiny, V::broadcast(0.0), V::broadcast(1.0) / theta);
      V ax[3];
      for (int i = 0; i < 3; ++i) {
        ax[i] = (a[3 * i][u] * wx + a[3 * i + 1][u] * wy + a[3 * i + 2][u] * wz) * inv;
      }
      const V proj = d[0] * ax[0] + d[1] * ax[1] + d[2] * ax[2];
      for (int i = 0; i < 3; ++i) q[i][u] = q[i][u] + proj * ax[i];
    }

    V sh, ch;
    vsincos(V::broadcast(0.5) * theta, sh, ch);
    const V two_s = V::broadcast(2.0) * sh;
    const V zero = V::broadcast(0.0);
    const V ca = select(tiny, zero, two_s * ch / theta);
    const V cb = select(tiny, zero, two_s * sh / theta2);
    const V one = V::broadcast(1.0);
    const V r[9] = {one + cb * (wx * wx - theta2), neg(ca) * wz + cb * wx * wy,
                    ca * wy + cb * wx * wz,        ca * wz + cb * wy * wx,
                    one + cb * (wy * wy - theta2), neg(ca) * wx + cb * wy * wz,
                    neg(ca) * wy + cb * wz * wx,   ca * wx + cb * wz * wy,
                    one + cb * (wz * wz - theta2)};
    multiply_into(a, u, r);
  }

  static void multiply_into(V (&a)[9][U], int u, const V* r) {
    V c[9];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        c[3 * i + j] = a[3 * i][u] * r[j] + a[3 * i + 1][u] * r[3 + j] + a[3 * i + 2][u] * r[6 + j];
      }
    }
    for (int k = 0; k < 9; ++k) a[k][u] = c[k];
  }

  /// Two Bjorck steps A <- A (3 I - A^T A) / 2.
  static void bjorck(V (&a)[9][U], int u) {
    for (int it = 0; it < 2; ++it) {
      V corr[9];
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const V g = a[i][u] * a[j][u] + a[3 + i][u] * a[3 + j][u] + a[6 + i][u] * a[6 + j][u];
          corr[3 * i + j] = V::broadcast(-0.5) * g;
        }
      }
      for (int k = 0; k < 9; k += 4) corr[k] = corr[k] + V::broadcast(1.5);
      multiply_into(a, u, corr);
    }
  }
};

template <class V, int U>
void run_batch(const KernelPlan& plan, LaneIO* lanes, int count) {
  BatchRunner<V, U> runner{plan, lanes, count, {}};
  const bool d = plan.exact_doubling;
  switch (plan.group) {
    case PlanGroup::aniso:
      d ? runner.template run<PlanGroup::aniso, true>() : runner.template run<PlanGroup::aniso, false>();
      break;
    case PlanGroup::e2:
      d ? runner.template run<PlanGroup::e2, true>() : runner.template run<PlanGroup::e2, false>();
      break;
    case PlanGroup::e3:
      d ? runner.template run<PlanGroup::e3, true>() : runner.template run<PlanGroup::e3, false>();
      break;
  }
}

template <class V>
void eval_math(MathFn fn, const double* in, double* out, std::size_t n, double gamma,
               double two_pow_gamma, bool branch_left) {
  constexpr int W = V::kLanes;
  alignas(64) double tmp_in[W];
  alignas(64) double tmp_out[W];
  for (std::size_t i = 0; i < n; i += W) {
    const std::size_t m = n - i < static_cast<std::size_t>(W) ? n - i : W;
    for (int l = 0; l < W; ++l) tmp_in[l] = in[i + (static_cast<std::size_t>(l) < m ? l : m - 1)];
    const V xv = V::load(tmp_in);
    V r = xv;
    V sn, cs;
    switch (fn) {
      case MathFn::log: r = vlog(xv); break;
      case MathFn::exp: r = vexp(xv); break;
      case MathFn::pm_step:
        r = vpm_step(xv, V::broadcast(gamma), V::broadcast(two_pow_gamma), branch_left);
        break;
      case MathFn::sin: vsincos(xv, sn, cs); r = sn; break;
      case MathFn::cos: vsincos(xv, sn, cs); r = cs; break;
      case MathFn::reduce_angle: r = vreduce_angle(xv); break;
    }
    r.store(tmp_out);
    for (std::size_t l = 0; l < m; ++l) out[i + l] = tmp_out[l];
  }
}

}  // namespace skewflow::kernels
