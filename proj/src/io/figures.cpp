#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "skewflow/analysis.hpp"
#include "skewflow/io.hpp"
#include "skewflow/regular.hpp"

namespace skewflow {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kTraces = 4;
constexpr int kFig1Points = 4001;
constexpr double kInsetXc = 0.1;
constexpr std::int64_t kInsetMargin = 200;

class ColumnFile {
 public:
  ColumnFile(fs::path path, const std::string& hash, const std::string& title,
             const std::vector<std::string>& columns)
      : path_(std::move(path)), out_(path_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot write " + path_.string());
    out_ << "# config_hash: " << hash << "\n# " << title << "\n#";
    for (const auto& c : columns) out_ << ' ' << c;
    out_ << '\n';
  }

  void comment(const std::string& text) { out_ << "# " << text << '\n'; }
  void blank() { out_ << '\n'; }

  /// Leading integer columns followed by real columns.
  void row(std::initializer_list<std::int64_t> ints, std::span<const double> reals) {
    bool first = true;
    for (std::int64_t v : ints) {
      out_ << (first ? "" : " ") << v;
      first = false;
    }
    for (double v : reals) {
      out_ << (first ? "" : " ") << format_double(v);
      first = false;
    }
    out_ << '\n';
  }

  fs::path close() {
    out_.close();
    if (!out_) throw DataError("write failed for " + path_.string());
    return path_;
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::vector<std::string> columns(std::initializer_list<const char*> head, std::size_t dim,
                                 const char* prefix) {
  std::vector<std::string> out(head.begin(), head.end());
  for (std::size_t k = 1; k <= dim; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

[[noreturn]] void unavailable(Figure f, const SimulationConfig& c, const char* needs) {
  throw DataError(std::string(to_string(f)) + " is not available for a " + std::string(to_string(c.group)) +
                  " run (it needs " + needs + ")");
}

fs::path write_fig1(const fs::path& dir, const EnsembleResult& run, const std::string& hash) {
  const SimulationConfig& c = run.config;
  const double x = run.records.front().x0;
  const auto rates = c.spec.rotation_generator(x);
  double slowest = std::numeric_limits<double>::infinity();
  for (double w : rates) slowest = std::min(slowest, std::abs(w));
  // Three turns of the slowest rotation, or the run length if that is shorter.
  const double t_end =
      std::min(static_cast<double>(std::max<std::int64_t>(c.n_steps, 1)), 6.0 * std::numbers::pi / slowest);

  auto cols = columns({}, c.dim, "p_");
  cols.insert(cols.begin(), "t");
  ColumnFile f(dir / "fig1.dat", hash, "fig1: closed-form regular path with the shape frozen at x0", cols);
  f.comment("x0 = " + format_double(x));
  if (c.group == GroupType::regular_even) {
    const auto v = c.spec.v(x);
    std::vector<std::complex<double>> vc(c.dim / 2);
    for (std::size_t j = 0; j < vc.size(); ++j) vc[j] = {v[2 * j], v[2 * j + 1]};
    f.comment("bound 2 sum |v_j|/|omega_j| = " + format_double(regular_even_bound(rates, vc)));
  }
  std::vector<double> values(c.dim + 1);
  for (int i = 0; i < kFig1Points; ++i) {
    const double t = t_end * i / (kFig1Points - 1);
    const auto p = regular_position(c, x, t);
    values[0] = t;
    std::copy(p.begin(), p.end(), values.begin() + 1);
    f.row({}, values);
  }
  return f.close();
}

/// (traj, step, p_1..p_d) for the first few trajectories, minus c n.
fs::path write_traces(const fs::path& path, const EnsembleResult& run, const std::string& hash,
                      const std::string& title, std::span<const double> c, const char* prefix) {
  const std::size_t d = run.config.dim;
  ColumnFile f(path, hash, title, columns({"traj", "step"}, d, prefix));
  std::vector<double> y(d);
  const std::size_t n = std::min(kTraces, run.records.size());
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectoryRecord& r = run.records[i];
    if (i) f.blank();
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto p = r.position(k);
      for (std::size_t j = 0; j < d; ++j) y[j] = p[j] - c[j] * static_cast<double>(r.steps[k]);
      f.row({r.index, r.steps[k]}, y);
    }
  }
  return f.close();
}

fs::path write_fig3_inset(const fs::path& dir, const EnsembleResult& run, const std::string& hash) {
  const SimulationConfig& c = run.config;
  const TrajectoryRecord& r = run.records.front();
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t j = 0; j < r.size();) {
    if (!(r.x[j] < kInsetXc)) {
      ++j;
      continue;
    }
    const std::size_t s = j;
    while (j < r.size() && r.x[j] < kInsetXc) ++j;
    if (j - s > best_len) best_len = j - s, best_start = s;
  }
  if (best_len == 0) throw DataError("fig3 inset: trajectory 0 has no laminar phase below x = 0.1");

  const double sup_v = c.spec.v.sup_norm(0.0, kInsetXc);
  const double c0 = std::abs(c.spec.rotation_generator(0.0)[0]);
  ColumnFile f(dir / "fig3_inset.dat", hash, "fig3 inset: window around the longest laminar phase of trajectory 0",
               {"step", "x", "p_1", "p_2"});
  f.comment("laminar phase x < " + format_double(kInsetXc) + " from step " + std::to_string(r.steps[best_start]) +
            ", length " + std::to_string(best_len));
  f.comment("loop bound 2 sup|v|/|c0| = " + format_double(2.0 * sup_v / c0));
  const std::size_t lo = best_start > static_cast<std::size_t>(kInsetMargin) ? best_start - kInsetMargin : 0;
  const std::size_t hi = std::min(r.size(), best_start + best_len + kInsetMargin);
  for (std::size_t k = lo; k < hi; ++k) {
    const auto p = r.position(k);
    const double vals[3] = {r.x[k], p[0], p[1]};
    f.row({r.steps[k]}, vals);
  }
  return f.close();
}

json read_analysis(const fs::path& run_dir) {
  const fs::path p = run_dir / "analysis.json";
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("missing " + p.string() + "; run analyze first");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt " + p.string() + ": " + e.what());
  }
}

}  // namespace

std::optional<Figure> parse_figure(std::string_view s) noexcept {
  if (s == "fig1") return Figure::fig1;
  if (s == "fig2") return Figure::fig2;
  if (s == "fig3") return Figure::fig3;
  if (s == "fig4") return Figure::fig4;
  return std::nullopt;
}

std::string_view to_string(Figure f) noexcept {
  switch (f) {
    case Figure::fig1: return "fig1";
    case Figure::fig2: return "fig2";
    case Figure::fig3: return "fig3";
    case Figure::fig4: return "fig4";
  }
  return "?";
}

std::vector<fs::path> write_figure(const fs::path& run_dir, Figure figure) {
  const json analysis = read_analysis(run_dir);
  const EnsembleResult run = load_run(run_dir);
  const SimulationConfig& c = run.config;
  const std::string hash = config_hash(c);
  if (analysis.value("config_hash", std::string()) != hash) {
    throw DataError("analysis.json belongs to a different config; rerun analyze");
  }
  if (run.records.empty()) throw DataError("run has no trajectories");

  const fs::path dir = run_dir / "figures";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  const std::vector<double> zero(c.dim, 0.0);
  std::vector<fs::path> out;
  switch (figure) {
    case Figure::fig1:
      if (c.group != GroupType::regular_even && c.group != GroupType::regular_odd) {
        unavailable(figure, c, "a regular_even or regular_odd run");
      }
      out.push_back(write_fig1(dir, run, hash));
      break;
    case Figure::fig2:
      if (c.group != GroupType::e3) unavailable(figure, c, "an e3 run");
      out.push_back(write_traces(dir / "fig2.dat", run, hash, "fig2: E(3) translation traces", zero, "p_"));
      break;
    case Figure::fig3:
      if (c.group != GroupType::e2) unavailable(figure, c, "an e2 run");
      out.push_back(write_traces(dir / "fig3.dat", run, hash, "fig3: E(2) translation traces", zero, "p_"));
      if (c.record_stride == 1 && c.record_x) out.push_back(write_fig3_inset(dir, run, hash));
      break;
    case Figure::fig4: {
      if (c.group != GroupType::aniso) unavailable(figure, c, "an aniso run");
      const json& drift = analysis.at("drift");
      if (!drift.contains("detrend_with")) throw DataError("analysis.json has no drift estimate for detrending");
      const auto cvec = drift.at("detrend_with").get<std::vector<double>>();
      if (cvec.size() != c.dim) throw DataError("analysis.json drift has the wrong dimension");
      std::ostringstream title;
      title << "fig4: detrended path p(n) - c n with c =";
      for (double v : cvec) title << ' ' << format_double(v);
      out.push_back(write_traces(dir / "fig4.dat", run, hash, title.str(), cvec, "y_"));
      break;
    }
  }
  return out;
}

}  // namespace skewflow
