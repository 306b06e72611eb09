#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "skewflow/io.hpp"

namespace skewflow {
namespace {

void put(std::string& line, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  line.append(buf, res.ptr);
}

template <class Int>
void put_int(std::string& line, Int v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

std::vector<std::string> trajectory_header(const SimulationConfig& c) {
  std::vector<std::string> cols{"traj_index", "step"};
  for (std::size_t k = 1; k <= c.dim; ++k) cols.push_back("p_" + std::to_string(k));
  if (c.record_x) cols.push_back("x");
  if (c.record_axis) {
    for (int k = 1; k <= 3; ++k) cols.push_back("axis_" + std::to_string(k));
  }
  return cols;
}

const std::vector<std::string> kMetaHeader{"traj_index", "seed", "x0", "hit_exact_zero",
                                           "rotation_error"};

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

/// Splits one CSV line into fields without allocating per field.
class Fields {
 public:
  Fields(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  std::string_view next() {
    if (pos_ > line_.size()) fail("too few columns");
    const auto comma = line_.find(',', pos_);
    const auto end = comma == std::string_view::npos ? line_.size() : comma;
    const std::string_view field = line_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return field;
  }

  void finish() const {
    if (pos_ <= line_.size()) fail("too many columns");
  }

  template <class T>
  T number() {
    const std::string_view f = next();
    T out{};
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      fail("cannot parse '" + std::string(f) + "'");
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string_view line_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

void expect_header(std::istream& in, const std::vector<std::string>& cols, const char* file) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string(file) + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != join(cols)) {
    throw DataError(std::string(file) + ": header '" + line + "' does not match the run config (expected '" +
                    join(cols) + "')");
  }
}

}  // namespace

std::string format_double(double v) {
  std::string s;
  put(s, v);
  return s;
}

void write_trajectories_csv(std::ostream& out, const EnsembleResult& result) {
  const SimulationConfig& c = result.config;
  out << join(trajectory_header(c)) << '\n';
  std::string line;
  for (const TrajectoryRecord& r : result.records) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      line.clear();
      put_int(line, r.index);
      line += ',';
      put_int(line, r.steps[k]);
      for (double v : r.position(k)) {
        line += ',';
        put(line, v);
      }
      if (c.record_x) {
        line += ',';
        put(line, r.x[k]);
      }
      if (c.record_axis) {
        for (double v : r.axis_part(k)) {
          line += ',';
          put(line, v);
        }
      }
      line += '\n';
      out << line;
    }
  }
}

void write_trajectory_meta_csv(std::ostream& out, const EnsembleResult& result) {
  out << join(kMetaHeader) << '\n';
  std::string line;
  for (const TrajectoryRecord& r : result.records) {
    line.clear();
    put_int(line, r.index);
    line += ',';
    put_int(line, r.seed);
    line += ',';
    put(line, r.x0);
    line += r.hit_exact_zero ? ",1," : ",0,";
    put(line, r.rotation_error);
    line += '\n';
    out << line;
  }
}

std::vector<TrajectoryRecord> read_trajectories(std::istream& trajectories, std::istream& meta,
                                                const SimulationConfig& config) {
  const std::size_t n_traj = static_cast<std::size_t>(config.n_traj);
  const std::size_t samples = static_cast<std::size_t>(samples_per_trajectory(config));
  const std::size_t dim = config.dim;

  std::vector<TrajectoryRecord> records(n_traj);
  std::string line;

  expect_header(meta, kMetaHeader, "trajectory_meta.csv");
  std::size_t line_no = 1;
  for (std::size_t i = 0; i < n_traj; ++i) {
    ++line_no;
    if (!std::getline(meta, line)) throw DataError("trajectory_meta.csv: expected " + std::to_string(n_traj) + " rows, found " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Fields f(line, line_no);
    TrajectoryRecord& r = records[i];
    r.index = f.number<std::int64_t>();
    if (r.index != static_cast<std::int64_t>(i)) f.fail("trajectory index out of order");
    r.seed = f.number<std::uint64_t>();
    r.x0 = f.number<double>();
    const int flag = f.number<int>();
    if (flag != 0 && flag != 1) f.fail("hit_exact_zero must be 0 or 1");
    r.hit_exact_zero = flag == 1;
    r.rotation_error = f.number<double>();
    f.finish();
    r.dim = dim;
    r.steps.resize(samples);
    r.p.resize(samples * dim);
    if (config.record_x) r.x.resize(samples);
    if (config.record_axis) r.axis.resize(samples * 3);
  }
  while (std::getline(meta, line)) {
    if (!line.empty() && line != "\r") throw DataError("trajectory_meta.csv: unexpected extra rows");
  }

  expect_header(trajectories, trajectory_header(config), "trajectories.csv");
  line_no = 1;
  for (std::size_t i = 0; i < n_traj; ++i) {
    TrajectoryRecord& r = records[i];
    for (std::size_t k = 0; k < samples; ++k) {
      ++line_no;
      if (!std::getline(trajectories, line)) {
        throw DataError("trajectories.csv: truncated at trajectory " + std::to_string(i) + ", sample " +
                        std::to_string(k));
      }
      if (!line.empty() && line.back() == '\r') line.pop_back();
      Fields f(line, line_no);
      if (f.number<std::int64_t>() != static_cast<std::int64_t>(i)) f.fail("trajectory index out of order");
      r.steps[k] = f.number<std::int64_t>();
      if (r.steps[k] != static_cast<std::int64_t>(k) * config.record_stride) f.fail("unexpected step value");
      for (std::size_t j = 0; j < dim; ++j) r.p[k * dim + j] = f.number<double>();
      if (config.record_x) r.x[k] = f.number<double>();
      if (config.record_axis) {
        for (std::size_t j = 0; j < 3; ++j) r.axis[k * 3 + j] = f.number<double>();
      }
      f.finish();
    }
  }
  while (std::getline(trajectories, line)) {
    if (!line.empty() && line != "\r") throw DataError("trajectories.csv: unexpected extra rows");
  }
  return records;
}

}  // namespace skewflow
