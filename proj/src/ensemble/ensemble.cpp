#include "skewflow/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "../kernels/dispatch.hpp"
#include "skewflow/regular.hpp"
#include "skewflow/seeding.hpp"
#include "skewflow/simd.hpp"
#include "skewflow/steppers.hpp"

namespace skewflow {
namespace {

constexpr std::size_t kMaxKernelDim = 16;

enum class Path { vector_kernel, reference, closed_form };

struct Plan {
  Path path = Path::reference;
  Backend backend = Backend::scalar;
  kernels::KernelPlan kplan;
  std::vector<double> fa, fb, ra, rb;
};

bool is_regular(GroupType g) {
  return g == GroupType::regular_even || g == GroupType::regular_odd;
}

Backend backend_for(KernelChoice k) {
  switch (k) {
    case KernelChoice::avx512: return Backend::avx512;
    case KernelChoice::avx2: return Backend::avx2;
    case KernelChoice::scalar: return Backend::scalar;
    default: return best_backend();
  }
}

Plan make_plan(const SimulationConfig& c) {
  Plan plan;
  if (is_regular(c.group)) {
    plan.path = Path::closed_form;
    return plan;
  }
  if (c.kernel == KernelChoice::reference ||
      (c.group == GroupType::aniso && c.dim > kMaxKernelDim)) {
    plan.path = Path::reference;
    return plan;
  }
  plan.path = Path::vector_kernel;
  plan.backend = backend_for(c.kernel);
  if (!backend_available(plan.backend)) {
    throw std::invalid_argument("kernel " + std::string(to_string(c.kernel)) +
                                " is not supported on this CPU");
  }
  const AffineField& field = c.group == GroupType::aniso ? c.spec.phi : c.spec.v;
  plan.fa = field.a;
  plan.fb = field.b;
  plan.ra = c.spec.rotation_generator.a;
  plan.rb = c.spec.rotation_generator.b;

  auto& k = plan.kplan;
  k.group = c.group == GroupType::aniso ? kernels::PlanGroup::aniso
            : c.group == GroupType::e2  ? kernels::PlanGroup::e2
                                        : kernels::PlanGroup::e3;
  k.dim = c.dim;
  k.gamma = c.params.gamma();
  k.two_pow_gamma = c.params.two_pow_gamma();
  k.branch_left = c.params.branch_at_half() == HalfBranch::left;
  k.exact_doubling = c.params.gamma() == 0.0;
  k.field_a = plan.fa.data();
  k.field_b = plan.fb.data();
  k.rot_a = plan.ra.data();
  k.rot_b = plan.rb.data();
  k.n_steps = c.n_steps;
  k.burn_in = c.burn_in;
  k.stride = c.record_stride;
  k.record_x = c.record_x;
  k.record_axis = c.record_axis;
  return plan;
}

TrajectoryRecord empty_record(const SimulationConfig& c, std::int64_t index) {
  TrajectoryRecord r;
  r.index = index;
  r.seed = derive_seed(c.base_seed, static_cast<std::uint64_t>(index));
  r.x0 = sample_initial_condition(r.seed);
  r.dim = c.dim;
  const std::int64_t samples = samples_per_trajectory(c);
  r.steps.resize(static_cast<std::size_t>(samples));
  for (std::int64_t s = 0; s < samples; ++s) r.steps[static_cast<std::size_t>(s)] = s * c.record_stride;
  r.p.assign(static_cast<std::size_t>(samples) * c.dim, 0.0);
  if (c.record_x) r.x.assign(static_cast<std::size_t>(samples), 0.0);
  if (c.record_axis) r.axis.assign(static_cast<std::size_t>(samples) * 3, 0.0);
  return r;
}

void run_kernel_batch(const Plan& plan, std::span<TrajectoryRecord> batch) {
  const auto& table = kernels::backend_table(plan.backend);
  std::vector<DoublingOrbit> orbits;
  if (plan.kplan.exact_doubling) {
    orbits.reserve(batch.size());
    for (const auto& r : batch) orbits.emplace_back(r.seed);
  }
  std::vector<kernels::LaneIO> lanes(batch.size());
  for (std::size_t l = 0; l < batch.size(); ++l) {
    auto& io = lanes[l];
    io.x0 = batch[l].x0;
    io.orbit = orbits.empty() ? nullptr : &orbits[l];
    io.p = batch[l].p.data();
    io.x = batch[l].x.empty() ? nullptr : batch[l].x.data();
    io.axis = batch[l].axis.empty() ? nullptr : batch[l].axis.data();
  }
  table.run_batch(plan.kplan, lanes.data(), static_cast<int>(lanes.size()));
  for (std::size_t l = 0; l < batch.size(); ++l) {
    batch[l].hit_exact_zero = lanes[l].hit_exact_zero;
    batch[l].rotation_error = lanes[l].rotation_error;
  }
}

void run_reference(const SimulationConfig& c, TrajectoryRecord& r) {
  const bool doubling = c.params.gamma() == 0.0;
  std::optional<DoublingOrbit> orbit;
  if (doubling) orbit.emplace(r.seed);
  double x = r.x0;
  auto advance = [&](double cur) {
    if (!doubling) return pm_step(cur, c.params);
    orbit->advance();
    return orbit->x();
  };
  for (std::int64_t k = 0; k < c.burn_in; ++k) x = advance(x);

  SkewProductState st;
  st.x = x;
  st.p.assign(c.dim, 0.0);
  if (c.group == GroupType::e2) st.rot = SO2{0.0};
  if (c.group == GroupType::e3) st.rot = SO3{identity3()};
  Vec3 q{0.0, 0.0, 0.0};

  const std::size_t d = c.dim;
  auto record = [&](std::size_t s) {
    std::copy(st.p.begin(), st.p.end(), r.p.begin() + static_cast<std::ptrdiff_t>(s * d));
    if (c.record_x) r.x[s] = st.x;
    if (c.record_axis) std::copy(q.begin(), q.end(), r.axis.begin() + static_cast<std::ptrdiff_t>(s * 3));
  };
  record(0);
  for (std::int64_t step = 1; step <= c.n_steps; ++step) {
    const double xj = st.x;
    switch (c.group) {
      case GroupType::aniso: st = step_anisotropic(st, c.params, c.spec); break;
      case GroupType::e2: st = step_e2(st, c.params, c.spec); break;
      case GroupType::e3: {
        if (c.record_axis) {
          const Mat3& a = std::get<SO3>(*st.rot).r;
          const auto w = c.spec.rotation_generator(xj);
          const auto v = c.spec.v(xj);
          const Vec3 dp = skewflow::apply(a, Vec3{v[0], v[1], v[2]});
          const double wn = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
          if (wn > 0.0) {
            Vec3 ax = skewflow::apply(a, Vec3{w[0], w[1], w[2]});
            for (double& e : ax) e /= wn;
            const double proj = dp[0] * ax[0] + dp[1] * ax[1] + dp[2] * ax[2];
            for (int i = 0; i < 3; ++i) q[i] += proj * ax[i];
          }
        }
        st = step_e3(st, c.params, c.spec);
        break;
      }
      default: throw std::logic_error("run_reference: unsupported group");
    }
    if (doubling) {
      orbit->advance();
      st.x = orbit->x();
    }
    if (step % c.record_stride == 0) record(static_cast<std::size_t>(step / c.record_stride));
  }
  r.hit_exact_zero = st.x == 0.0;
  if (c.group == GroupType::e3) r.rotation_error = orthogonality_error(std::get<SO3>(*st.rot).r);
}

void run_closed_form(const SimulationConfig& c, TrajectoryRecord& r) {
  // Regular dynamics: the shape sits at the equilibrium x0 for all time.
  const std::size_t d = c.dim;
  for (std::size_t s = 0; s < r.steps.size(); ++s) {
    const auto pos = regular_position(c, r.x0, static_cast<double>(r.steps[s]));
    std::copy(pos.begin(), pos.end(), r.p.begin() + static_cast<std::ptrdiff_t>(s * d));
    if (c.record_x) r.x[s] = r.x0;
  }
}

std::string backend_name(const Plan& plan) {
  switch (plan.path) {
    case Path::vector_kernel: return std::string(to_string(plan.backend));
    case Path::reference: return "reference";
    case Path::closed_form: return "closed_form";
  }
  return "?";
}

}  // namespace

std::string resolve_kernel_name(KernelChoice choice) {
  if (choice == KernelChoice::reference) return "reference";
  return std::string(to_string(backend_for(choice)));
}

TrajectoryRecord run_trajectory(const SimulationConfig& config, std::int64_t index) {
  validate(config);
  if (index < 0 || index >= config.n_traj) {
    throw std::out_of_range("trajectory index " + std::to_string(index) + " out of range");
  }
  const Plan plan = make_plan(config);
  TrajectoryRecord r = empty_record(config, index);
  switch (plan.path) {
    case Path::vector_kernel: run_kernel_batch(plan, std::span<TrajectoryRecord>(&r, 1)); break;
    case Path::reference: run_reference(config, r); break;
    case Path::closed_form: run_closed_form(config, r); break;
  }
  return r;
}

EnsembleResult run_ensemble(const SimulationConfig& config, const RunOptions& options) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const Plan plan = make_plan(config);

  EnsembleResult result;
  result.config = config;
  result.kernel = backend_name(plan);
  result.records.reserve(static_cast<std::size_t>(config.n_traj));
  for (std::int64_t i = 0; i < config.n_traj; ++i) result.records.push_back(empty_record(config, i));

  const std::size_t n = result.records.size();
  const std::size_t chunk =
      plan.path == Path::vector_kernel ? static_cast<std::size_t>(batch_lanes(plan.backend)) : 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, n_chunks));

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::vector<std::pair<std::int64_t, std::string>> failures;

  auto work = [&] {
    for (std::size_t b = next.fetch_add(1); b < n_chunks; b = next.fetch_add(1)) {
      const std::size_t lo = b * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      std::span<TrajectoryRecord> batch(result.records.data() + lo, hi - lo);
      try {
        switch (plan.path) {
          case Path::vector_kernel: run_kernel_batch(plan, batch); break;
          case Path::reference: run_reference(config, batch[0]); break;
          case Path::closed_form: run_closed_form(config, batch[0]); break;
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        for (const auto& r : batch) failures.emplace_back(r.index, e.what());
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    std::string msg = "trajectories failed:";
    for (const auto& [idx, what] : failures) msg += " [" + std::to_string(idx) + ": " + what + "]";
    throw std::runtime_error(msg);
  }

  result.total_steps = config.n_traj * (config.n_steps + config.burn_in);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<double> regular_position(const SimulationConfig& c, double x, double t) {
  if (c.group != GroupType::regular_even && c.group != GroupType::regular_odd) {
    throw std::invalid_argument("regular_position: group " + std::string(to_string(c.group)) +
                                " has no closed form");
  }
  const auto v = c.spec.v(x);
  const auto w = c.spec.rotation_generator(x);
  const std::size_t d = c.dim;
  const std::size_t offset = c.group == GroupType::regular_odd ? 1 : 0;
  std::vector<std::complex<double>> vc(d / 2);
  for (std::size_t j = 0; j < vc.size(); ++j) vc[j] = {v[offset + 2 * j], v[offset + 2 * j + 1]};

  std::vector<double> out(d);
  std::vector<std::complex<double>> blocks;
  if (c.group == GroupType::regular_odd) {
    OddPath path = regular_translation_odd(v[0], w, vc, t);
    out[0] = path.axial;
    blocks = std::move(path.transverse);
  } else {
    blocks = regular_translation_even(w, vc, t);
  }
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    out[offset + 2 * j] = blocks[j].real();
    out[offset + 2 * j + 1] = blocks[j].imag();
  }
  return out;
}

}  // namespace skewflow
