#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "skewflow/analysis.hpp"
#include "skewflow/io.hpp"

using namespace skewflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("skewflow_test_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

SimulationConfig small(GroupType g, std::size_t dim, double gamma) {
  SimulationConfig c;
  c.group = g;
  c.dim = dim;
  c.params = PMParams(gamma);
  c.spec = default_observables(g, dim);
  c.n_traj = 5;
  c.n_steps = 3000;
  c.record_stride = 10;
  c.burn_in = 100;
  return c;
}

std::vector<std::vector<double>> read_columns(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) *header += line + "\n";
      continue;
    }
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------- config text

TEST(ConfigText, MinimalUsesDefaults) {
  const auto c = parse_config("[group]\ntype = e3\n");
  EXPECT_EQ(c.group, GroupType::e3);
  EXPECT_EQ(c.dim, 3u);
  EXPECT_EQ(c.spec, default_observables(GroupType::e3, 3));
  EXPECT_EQ(c.params.gamma(), 0.7);
  EXPECT_EQ(c.n_traj, 1000);
}

TEST(ConfigText, AllKeys) {
  const auto c = parse_config(R"(
# every key
[group]
type = e2
dim = 2
[dynamics]
gamma = 0.25
branch_at_half = left
[observables]
v_a = 1, 0
v_b = 0.5, 0   # trailing comment
rot_a = 0
[ensemble]
n_steps = 1e5
n_traj = 64
burn_in = 0
record_stride = 100
record_x = true
record_axis = false
kernel = scalar
[seeds]
base_seed = 0xFF
)");
  EXPECT_EQ(c.group, GroupType::e2);
  EXPECT_EQ(c.params, PMParams(0.25, HalfBranch::left));
  EXPECT_EQ(c.spec.v.b, (std::vector<double>{0.5, 0.0}));
  EXPECT_EQ(c.spec.rotation_generator.a, std::vector<double>{0.0});
  EXPECT_EQ(c.spec.rotation_generator.b, std::vector<double>{0.0});
  EXPECT_EQ(c.n_steps, 100'000);
  EXPECT_EQ(c.n_traj, 64);
  EXPECT_TRUE(c.record_x);
  EXPECT_EQ(c.kernel, KernelChoice::scalar);
  EXPECT_EQ(c.base_seed, 255u);
}

TEST(ConfigText, GammaOutOfRange) {
  try {
    parse_config("[dynamics]\ngamma = 1.2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma out of range [0,1)"), std::string::npos);
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(ConfigText, DiagnosticsCarryLineAndKey) {
  struct Case {
    const char* text;
    int line;
    const char* key;
  };
  const Case cases[] = {
      {"[group]\ntype = aniso\nsize = 3\n", 3, "size"},
      {"[groups]\n", 1, ""},
      {"[ensemble]\nn_traj = 5\nn_traj = 6\n", 3, "n_traj"},
      {"n_traj = 5\n", 1, "n_traj"},
      {"[ensemble]\nn_traj = five\n", 2, "ensemble.n_traj"},
      {"[ensemble]\nn_traj = 0\n", 2, "ensemble.n_traj"},
      {"[ensemble]\nrecord_x = maybe\n", 2, "ensemble.record_x"},
      {"[group]\ntype = e4\n", 2, "group.type"},
      {"[ensemble]\nkernel = gpu\n", 2, "ensemble.kernel"},
      {"[group]\ntype = e2\ndim = 3\n", 3, "group.dim"},
      {"[observables]\nphi_a = 1,,2\n", 2, "observables.phi_a"},
      {"[ensemble]\nn_traj\n", 2, ""},
  };
  for (const auto& c : cases) {
    try {
      parse_config(c.text);
      ADD_FAILURE() << c.text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), c.line) << c.text << " -> " << e.what();
      EXPECT_EQ(e.key(), c.key) << c.text << " -> " << e.what();
    }
  }
}

TEST(ConfigText, SerializeRoundTrip) {
  auto c = small(GroupType::e3, 3, 0.7);
  c.spec.v = AffineField::affine({0.1, 1.0 / 3.0, -2.5e-17}, {1e300, 0.0, 7.0});
  c.base_seed = ~0ULL;
  c.record_axis = true;
  c.kernel = KernelChoice::reference;
  const std::string text = serialize_config(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
  EXPECT_EQ(config_hash(c), sha256_hex(text));
}

TEST(Hashing, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const fs::path p = scratch("hash.txt");
  std::ofstream(p) << "abc";
  EXPECT_EQ(sha256_file(p), sha256_hex("abc"));
}

// ---------------------------------------------------------------- CSV

TEST(Csv, RoundTripIsExact) {
  for (auto [g, d] : {std::pair{GroupType::aniso, 2}, {GroupType::e2, 2}, {GroupType::e3, 3}}) {
    auto c = small(g, d, 0.7);
    c.record_x = true;
    c.record_axis = g == GroupType::e3;
    const auto e = run_ensemble(c);
    std::stringstream traj, meta;
    write_trajectories_csv(traj, e);
    write_trajectory_meta_csv(meta, e);
    EXPECT_EQ(read_trajectories(traj, meta, c), e.records);
  }
}

TEST(Csv, SeventeenDigits) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Csv, RowCountAndHeader) {
  auto c = small(GroupType::aniso, 1, 0.7);
  c.n_traj = 2;
  c.n_steps = 100;
  c.record_stride = 1;
  std::stringstream traj;
  write_trajectories_csv(traj, run_ensemble(c));
  std::string line;
  std::getline(traj, line);
  EXPECT_EQ(line, "traj_index,step,p_1");
  int rows[2] = {0, 0};
  while (std::getline(traj, line)) ++rows[std::stoi(line.substr(0, line.find(',')))];
  EXPECT_EQ(rows[0], 101);
  EXPECT_EQ(rows[1], 101);
}

TEST(Csv, MalformedInputRejected) {
  const auto c = small(GroupType::aniso, 1, 0.7);
  const auto e = run_ensemble(c);
  std::stringstream traj, meta;
  write_trajectories_csv(traj, e);
  write_trajectory_meta_csv(meta, e);
  std::string t = traj.str();
  const std::string m = meta.str();

  auto attempt = [&](std::string tt, std::string mm) {
    std::istringstream a(tt), b(mm);
    return read_trajectories(a, b, c);
  };
  EXPECT_THROW(attempt(t.substr(0, t.size() / 2), m), DataError);
  std::string bad = t;
  bad.replace(bad.find("\n0,10,") + 6, 1, "x");
  EXPECT_THROW(attempt(bad, m), DataError);
  EXPECT_THROW(attempt("traj_index,step,p_1,x\n", m), DataError);
  EXPECT_THROW(attempt(t + "9,0,0\n", m), DataError);
}

// ---------------------------------------------------------------- run directories

TEST(RunDir, WriteLoadAndVerify) {
  const fs::path dir = scratch("run");
  auto c = small(GroupType::e2, 2, 0.7);
  c.record_x = true;
  const auto e = run_ensemble(c);
  const auto m = write_run(dir, e);
  EXPECT_EQ(m.config_hash, config_hash(c));
  ASSERT_EQ(m.artifacts.size(), 2u);
  for (const auto& a : m.artifacts) EXPECT_EQ(sha256_file(dir / a.path), a.sha256);

  const auto back = load_run(dir);
  EXPECT_EQ(back.config, c);
  EXPECT_EQ(back.records, e.records);
  EXPECT_EQ(back.kernel, e.kernel);

  // Same config, second directory: same content hash.
  const fs::path dir2 = scratch("run2");
  EXPECT_EQ(write_run(dir2, run_ensemble(c)).content_hash, m.content_hash);

  // Config echo re-runs to the same hashes.
  const auto echo = parse_config(read_manifest(dir).config_text);
  const fs::path dir3 = scratch("run3");
  EXPECT_EQ(write_run(dir3, run_ensemble(echo)).content_hash, m.content_hash);
}

TEST(RunDir, TamperingDetected) {
  const fs::path dir = scratch("tamper");
  write_run(dir, run_ensemble(small(GroupType::aniso, 1, 0.7)));
  {
    std::ofstream f(dir / "trajectories.csv", std::ios::app);
    f << "0,0,0\n";
  }
  EXPECT_THROW(load_run(dir), DataError);
  EXPECT_THROW(load_run(scratch("missing")), DataError);
  const fs::path dir2 = scratch("badjson");
  fs::create_directories(dir2);
  std::ofstream(dir2 / "manifest.json") << "{ not json";
  EXPECT_THROW(read_manifest(dir2), DataError);
}

TEST(RunDir, UnwritableDirectory) {
  const fs::path file = scratch("plainfile");
  std::ofstream(file) << "x";
  EXPECT_THROW(write_run(file / "sub", run_ensemble(small(GroupType::aniso, 1, 0.7))), DataError);
}

// ---------------------------------------------------------------- analysis

TEST(AnalysisOptionsText, ParseAndErrors) {
  const auto o = parse_analysis_options("[analysis]\nstatistics = iqr, rms\nblock_length = 5000\nlaminar_x_c = 0.1\n");
  EXPECT_EQ(o.statistics, (std::vector<Statistic>{Statistic::iqr, Statistic::rms}));
  EXPECT_EQ(o.block_length, 5000);
  EXPECT_EQ(o.laminar_x_c, std::vector<double>{0.1});
  try {
    parse_analysis_options("[analysis]\n\nwindow = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_analysis_options("[analysis]\nstatistics = mean\n"), ConfigError);
  EXPECT_THROW(parse_analysis_options("[other]\n"), ConfigError);
}

namespace {

std::string analyze_label(GroupType g, std::size_t dim, double gamma, nlohmann::json* report = nullptr) {
  SimulationConfig c = small(g, dim, gamma);
  c.n_traj = 1000;
  c.n_steps = 1'000'000;
  c.record_stride = 1000;
  c.burn_in = 10'000;
  c.record_axis = g == GroupType::e3;
  AnalysisOptions o;
  o.laminar_orbit_steps = 100'000;
  const auto r = analyze(run_ensemble(c), o);
  if (report) *report = r;
  return r.at("classification").at("label").get<std::string>();
}

}  // namespace

TEST(Analyze, StrongChaosAnisotropic) {
  nlohmann::json r;
  EXPECT_EQ(analyze_label(GroupType::aniso, 1, 0.2, &r), "drift+diffusive");
  for (const char* section : {"drift", "scaling", "tails", "laminar", "autocorrelation", "normality"}) {
    EXPECT_TRUE(r.contains(section)) << section;
    EXPECT_FALSE(r.at(section).contains("error")) << section << ": " << r.at(section).dump();
  }
  EXPECT_TRUE(r["scaling"]["full"].contains("iqr"));
  EXPECT_TRUE(r["drift"]["significant"].get<bool>());
  EXPECT_TRUE(r["drift"]["resolved"].get<bool>());
}

TEST(Analyze, WeakChaosE2IsDiffusive) { EXPECT_EQ(analyze_label(GroupType::e2, 2, 0.7), "diffusive"); }

TEST(Analyze, WeakChaosE3IsSuperdiffusive) { EXPECT_EQ(analyze_label(GroupType::e3, 3, 0.7), "superdiffusive"); }

TEST(Analyze, RegularRuns) {
  for (auto [g, d, want] : {std::tuple{GroupType::regular_even, 2, "bounded"}, {GroupType::regular_odd, 3, "ballistic"}}) {
    auto c = small(g, d, 0.7);
    c.n_traj = 200;
    c.n_steps = 100'000;
    c.record_stride = 100;
    const auto r = analyze(run_ensemble(c));
    EXPECT_EQ(r["classification"]["label"], want) << r["classification"].dump();
  }
}

TEST(Analyze, FailingSectionsReportErrors) {
  auto c = small(GroupType::aniso, 1, 0.7);
  c.n_steps = 100;
  AnalysisOptions o;
  o.laminar_orbit_steps = 10'000;
  o.autocorr_max_lag = 100;
  const auto r = analyze(run_ensemble(c), o);
  EXPECT_TRUE(r["drift"].contains("error"));
  EXPECT_EQ(r["classification"]["label"], "inconclusive");
}

TEST(Analyze, LabelIndependentOfWorkers) {
  auto c = small(GroupType::aniso, 1, 0.2);
  c.n_traj = 200;
  c.n_steps = 200'000;
  c.record_stride = 1000;
  AnalysisOptions o;
  o.laminar_orbit_steps = 10'000;
  o.autocorr_max_lag = 100;
  // Compare text: NaN fields serialize as null but never compare equal.
  EXPECT_EQ(analyze(run_ensemble(c, {1}), o).dump(), analyze(run_ensemble(c, {6}), o).dump());
}

// ---------------------------------------------------------------- figures

namespace {

fs::path analyzed_run(const std::string& name, const SimulationConfig& c) {
  const fs::path dir = scratch(name);
  write_run(dir, run_ensemble(c));
  AnalysisOptions o;
  o.laminar_orbit_steps = 10'000;
  o.autocorr_max_lag = 100;
  analyze_run_dir(dir, o);
  return dir;
}

}  // namespace

TEST(Figures, RequireAnalysis) {
  const fs::path dir = scratch("fig_noanalysis");
  write_run(dir, run_ensemble(small(GroupType::aniso, 1, 0.7)));
  EXPECT_THROW(write_figure(dir, Figure::fig4), DataError);
}

TEST(Figures, WrongGroupIsDataError) {
  const fs::path dir = analyzed_run("fig_wrong", small(GroupType::aniso, 1, 0.7));
  for (Figure f : {Figure::fig1, Figure::fig2, Figure::fig3}) EXPECT_THROW(write_figure(dir, f), DataError);
}

TEST(Figures, Fig1OddCorkscrew) {
  auto c = small(GroupType::regular_odd, 3, 0.7);
  c.n_steps = 100'000;
  const fs::path dir = analyzed_run("fig1_odd", c);
  const auto files = write_figure(dir, Figure::fig1);
  ASSERT_EQ(files.size(), 1u);
  std::string header;
  const auto rows = read_columns(files[0], &header);
  EXPECT_NE(header.find("# config_hash: " + config_hash(c)), std::string::npos);
  EXPECT_NE(header.find("t p_1 p_2 p_3"), std::string::npos);
  ASSERT_GT(rows.size(), 1000u);
  const double v1 = rows.back()[1] / rows.back()[0];
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 4u);
    ASSERT_NEAR(r[1], v1 * r[0], 1e-12 * (1 + std::abs(r[1])));
    ASSERT_LE(std::hypot(r[2], r[3]), 2 * v1 + 1e-12);
  }
}

TEST(Figures, Fig1EvenBoundedLoop) {
  auto c = small(GroupType::regular_even, 2, 0.7);
  const auto rows = read_columns(write_figure(analyzed_run("fig1_even", c), Figure::fig1)[0]);
  for (const auto& r : rows) ASSERT_LE(std::hypot(r[1], r[2]), 2 * 2.0 + 1e-12);  // |v| <= 2 on [0, 1]
}

TEST(Figures, Fig4FlightsPointDown) {
  auto c = small(GroupType::aniso, 1, 0.7);
  c.n_traj = 8;
  c.n_steps = 1'000'000;
  c.record_stride = 1000;
  const auto rows = read_columns(write_figure(analyzed_run("fig4", c), Figure::fig4)[0]);
  std::vector<double> inc;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] == rows[i - 1][0]) inc.push_back(rows[i][2] - rows[i - 1][2]);
  }
  ASSERT_GT(inc.size(), 3000u);
  std::partial_sort(inc.begin(), inc.begin() + 10, inc.end(),
                    [](double a, double b) { return std::abs(a) > std::abs(b); });
  for (int i = 0; i < 10; ++i) EXPECT_LT(inc[i], 0.0) << i;
}

TEST(Figures, Fig3InsetLoopsAreBounded) {
  auto c = small(GroupType::e2, 2, 0.7);
  c.n_traj = 4;
  c.n_steps = 300'000;
  c.record_stride = 1;
  c.record_x = true;
  const auto files = write_figure(analyzed_run("fig3", c), Figure::fig3);
  ASSERT_EQ(files.size(), 2u);
  const auto rows = read_columns(files[1]);
  // Segment-wise check: frozen-x circles have diameter |v| / sin(c0/2),
  // dominated by the discrete bound for v(x) = 1 + x on [0, 0.1].
  const double bound = discrete_loop_bound(1.1, 0.1, 1.0);
  std::size_t laminar = 0;
  for (std::size_t i = 0; i < rows.size();) {
    if (!(rows[i][1] < 0.1)) {
      ++i;
      continue;
    }
    const std::size_t s = i;
    double worst = 0;
    while (i < rows.size() && rows[i][1] < 0.1) {
      worst = std::max(worst, std::hypot(rows[i][2] - rows[s][2], rows[i][3] - rows[s][3]));
      ++i;
      ++laminar;
    }
    EXPECT_LE(worst, bound);
  }
  EXPECT_GT(laminar, 50u);
}

TEST(Figures, Fig2Traces) {
  auto c = small(GroupType::e3, 3, 0.7);
  std::string header;
  const auto rows = read_columns(write_figure(analyzed_run("fig2", c), Figure::fig2)[0], &header);
  EXPECT_NE(header.find("traj step p_1 p_2 p_3"), std::string::npos);
  EXPECT_EQ(rows.size(), 4u * 301u);
}
