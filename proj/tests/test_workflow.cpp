#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "test_support.hpp"
#include "windopt/workflow.hpp"

using namespace windopt;
namespace wt = windopt::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("windopt_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_synthetic_csv(const fs::path& dir, std::size_t n, std::uint64_t seed) {
  const auto data = wt::make_dependent_wind_data(n, 10.0, 2.0, 260.0 * kDeg, 2.5,
                                                 std::sin(std::numbers::pi / 4.0), seed);
  const fs::path file = dir / "wind.csv";
  std::ofstream out(file, std::ios::binary);
  out << "timestamp,speed_mps,direction_deg\n";
  for (std::size_t i = 0; i < n; ++i)
    out << "2010-01-01T" << i % 24 << ":00," << data.speeds[i] << ','
        << data.directions_rad[i] / kDeg << '\n';
  return file;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small, fast configuration for pipeline tests.
RunConfig small_config(const fs::path& dir) {
  RunConfig cfg;
  cfg.output_dir = dir;
  cfg.model_file = dir / "model.json";
  cfg.master_seed = 2024;
  cfg.grid = {{32, 8, 16}, {2000.0, 160.0, 240.0}};
  cfg.geometry.n_strips = 8;
  cfg.load.dt = 2.0;
  cfg.vm_components = 1;
  cfg.optimizer.step_size = 2e-9;
  cfg.optimizer.initial_batch = 2;
  cfg.optimizer.max_batch = 6;
  cfg.optimizer.max_iterations = 6;
  cfg.optimizer.relative_tolerance = 1e-9;  // keep short runs from stopping early
  return cfg;
}

}  // namespace

TEST_CASE("wind csv parsing and error reporting") {
  const auto dir = fresh_dir("csv");

  const fs::path good = write_synthetic_csv(dir, 50, 9);
  const WindDataset data = read_wind_csv(good);
  CHECK(data.size() == 50);
  CHECK(data.speeds.front() > 0.0);

  const fs::path empty = dir / "empty.csv";
  std::ofstream(empty).close();
  CHECK_THROWS_AS(read_wind_csv(empty), std::invalid_argument);

  const fs::path bad_header = dir / "bad_header.csv";
  std::ofstream(bad_header) << "time,speed,dir\n1,2,3\n";
  CHECK_THROWS_AS(read_wind_csv(bad_header), std::invalid_argument);

  const fs::path bad_row = dir / "bad_row.csv";
  std::ofstream(bad_row) << "timestamp,speed_mps,direction_deg\n"
                            "t1,5.0,100\n"
                            "t2,not_a_number,90\n";
  try {
    read_wind_csv(bad_row);
    FAIL("expected parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const fs::path bad_range = dir / "bad_range.csv";
  std::ofstream(bad_range) << "timestamp,speed_mps,direction_deg\nt1,5.0,361\n";
  CHECK_THROWS_AS(read_wind_csv(bad_range), std::invalid_argument);

  fs::remove_all(dir);
}

TEST_CASE("run config json round trip") {
  RunConfig cfg;
  cfg.problem = "prob2";
  cfg.master_seed = 99;
  cfg.beta = 0.85;
  cfg.optimize_taper = false;
  cfg.grid = {{64, 16, 16}, {1000.0, 200.0, 200.0}};
  cfg.optimizer.step_size = 0.123;
  cfg.pwd = PwdOverride{250.0, 9.0, 0.04, 0.25};

  const RunConfig back = RunConfig::from_json(cfg.to_json());
  CHECK(back.problem == "prob2");
  CHECK(back.master_seed == 99);
  CHECK(back.beta == 0.85);
  CHECK(back.optimize_taper == false);
  CHECK(back.grid.n == cfg.grid.n);
  CHECK(back.grid.extent == cfg.grid.extent);
  CHECK(back.optimizer.step_size == 0.123);
  REQUIRE(back.pwd.has_value());
  CHECK(back.pwd->theta_deg == 250.0);

  nlohmann::json bad;
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(RunConfig::from_json(bad), std::runtime_error);
}

TEST_CASE("calibrate recovers the synthetic generating model") {
  const auto dir = fresh_dir("calibrate");
  RunConfig cfg = small_config(dir);
  cfg.wind_data_csv = write_synthetic_csv(dir, 4000, 31);

  std::ostringstream diag;
  const CalibrationReport report = cmd_calibrate(cfg, diag);

  CHECK(report.n_records == 4000);
  CHECK(report.speed_fit.marginal.scale == doctest::Approx(10.0).epsilon(0.05));
  CHECK(report.speed_fit.marginal.shape == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::abs(report.direction_fit.mixture.mode() - 260.0 * kDeg) < 0.05);
  CHECK(report.kendall_tau_pseudo == doctest::Approx(0.5).epsilon(0.1));
  CHECK(report.ks_speed < 0.02);
  CHECK(report.ks_direction < 0.02);
  CHECK(diag.str().find("weibull") != std::string::npos);
  CHECK(fs::exists(cfg.model_file));

  // Re-running produces a byte-identical model file.
  const std::string first = slurp(cfg.model_file);
  std::ostringstream diag2;
  cmd_calibrate(cfg, diag2);
  CHECK(slurp(cfg.model_file) == first);

  fs::remove_all(dir);
}

TEST_CASE("prob3 runs deterministically with batch pinned at one") {
  const auto dir = fresh_dir("prob3");
  RunConfig cfg = small_config(dir);
  cfg.problem = "prob3";
  cfg.pwd = PwdOverride{260.0, 1.0, 0.05, 0.5};
  cfg.optimize_taper = false;
  cfg.optimizer.max_iterations = 4;

  std::ostringstream diag;
  const OptimizeOutcome outcome = cmd_optimize(cfg, diag);
  REQUIRE_FALSE(outcome.record.iterations.empty());
  for (const auto& it : outcome.record.iterations) CHECK(it.batch_size == 1);
  CHECK(fs::exists(outcome.record_csv));
  CHECK(fs::exists(outcome.summary_json));

  // Record CSV layout and row round-trip.
  std::ifstream rec(outcome.record_csv);
  std::string header;
  std::getline(rec, header);
  CHECK(header == "iter,psi,a,J,gradnorm,batch,sstar");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(rec, line)) {
    int iter, batch;
    double psi, a, j, gradnorm, sstar;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%d,%lf", &iter, &psi, &a, &j,
                        &gradnorm, &batch, &sstar) == 7);
    CHECK(iter == static_cast<int>(rows));
    CHECK(batch == 1);
    if (rows == 0) CHECK(psi == 160.0);
    ++rows;
  }
  CHECK(rows == outcome.record.iterations.size());

  fs::remove_all(dir);
}

TEST_CASE("prob1 descends on a fixed scenario set") {
  const auto dir = fresh_dir("prob1_descent");
  RunConfig cfg = small_config(dir);
  cfg.wind_data_csv = write_synthetic_csv(dir, 1200, 17);
  std::ostringstream diag;
  cmd_calibrate(cfg, diag);

  cfg.problem = "prob1";
  cfg.optimize_taper = false;
  cfg.optimizer.step_size = 2e-8;
  cfg.optimizer.initial_batch = 4;
  cfg.optimizer.max_batch = 4;
  cfg.optimizer.reuse_samples = true;  // deterministic descent on one batch
  cfg.optimizer.max_iterations = 10;

  const OptimizeOutcome outcome = cmd_optimize(cfg, diag);
  CHECK(outcome.improvement_ratio > 0.0);
  CHECK(outcome.objective_final < outcome.objective_initial);

  fs::remove_all(dir);
}

TEST_CASE("optimize runs are byte-reproducible under one master seed") {
  const auto dir = fresh_dir("repro");
  RunConfig cfg = small_config(dir);
  cfg.wind_data_csv = write_synthetic_csv(dir, 800, 55);
  std::ostringstream diag;
  cmd_calibrate(cfg, diag);

  cfg.problem = "prob1";
  cfg.optimizer.max_iterations = 3;

  cfg.output_dir = dir / "run_a";
  const OptimizeOutcome a = cmd_optimize(cfg, diag);
  cfg.output_dir = dir / "run_b";
  const OptimizeOutcome b = cmd_optimize(cfg, diag);
  CHECK(slurp(a.record_csv) == slurp(b.record_csv));

  // A different seed changes the draw path.
  cfg.master_seed = 777;
  cfg.output_dir = dir / "run_c";
  const OptimizeOutcome c = cmd_optimize(cfg, diag);
  CHECK(slurp(a.record_csv) != slurp(c.record_csv));

  // Worker count must not affect the bytes.
  cfg.master_seed = 2024;
  cfg.optimizer.workers = 2;
  cfg.output_dir = dir / "run_d";
  const OptimizeOutcome d = cmd_optimize(cfg, diag);
  CHECK(slurp(a.record_csv) == slurp(d.record_csv));

  fs::remove_all(dir);
}

TEST_CASE("evaluate reports risk statistics and is seed-stable") {
  const auto dir = fresh_dir("evaluate");
  RunConfig cfg = small_config(dir);
  cfg.wind_data_csv = write_synthetic_csv(dir, 800, 21);
  std::ostringstream diag;
  cmd_calibrate(cfg, diag);

  const Design design{200.0 * kDeg, 20.0};

  cfg.output_dir = dir / "eval1";
  const EvaluationReport one = cmd_evaluate(cfg, design, 1, diag);
  CHECK(one.n_samples == 1);
  CHECK_FALSE(one.stddev.has_value());

  cfg.output_dir = dir / "eval12";
  const EvaluationReport r1 = cmd_evaluate(cfg, design, 12, diag);
  CHECK(r1.stddev.has_value());
  CHECK(r1.cvar_beta >= r1.mean - 1e-12);
  CHECK(r1.cvar_beta >= r1.var_beta - 1e-12);
  CHECK(fs::exists(r1.histogram_csv));
  CHECK(fs::exists(r1.cdf_csv));

  cfg.output_dir = dir / "eval12b";
  const EvaluationReport r2 = cmd_evaluate(cfg, design, 12, diag);
  CHECK(r1.mean == r2.mean);
  CHECK(r1.cvar_beta == r2.cvar_beta);
  CHECK(slurp(r1.cdf_csv) == slurp(r2.cdf_csv));

  fs::remove_all(dir);
}

TEST_CASE("windrose frequencies are normalized and deterministic") {
  const auto dir = fresh_dir("windrose");
  RunConfig cfg = small_config(dir);
  cfg.wind_data_csv = write_synthetic_csv(dir, 1500, 63);
  std::ostringstream diag;
  cmd_calibrate(cfg, diag);

  const WindroseTable rose = cmd_windrose(cfg, 2500, diag);
  CHECK(rose.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fs::exists(rose.csv));

  const std::string bytes = slurp(rose.csv);
  cmd_windrose(cfg, 2500, diag);
  CHECK(slurp(rose.csv) == bytes);

  fs::remove_all(dir);
}

TEST_CASE("windrose of an independence-forced model matches the direction marginal") {
  const auto dir = fresh_dir("windrose_indep");
  RunConfig cfg = small_config(dir);

  // Hand-built model: product copula (independent uniform pseudo-pairs).
  ScenarioDistribution dist;
  dist.speed = {10.0, 2.0};
  dist.direction = VonMisesMixture({{1.0, 260.0 * kDeg, 2.5}});
  Rng rng(5);
  std::vector<std::array<double, 2>> pts(4000);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  dist.copula = EmpiricalCopula(std::move(pts));
  save_model(dist, cfg.model_file);

  std::ostringstream diag;
  const WindroseTable rose = cmd_windrose(cfg, 4000, diag);

  for (int s = 0; s < rose.n_sectors; ++s) {
    double sector_freq = 0.0;
    for (double f : rose.freq[s]) sector_freq += f;
    const double lo = s * 30.0 * kDeg, hi = (s + 1) * 30.0 * kDeg;
    const double expected = dist.direction.cdf(hi - 1e-12) - dist.direction.cdf(lo);
    CHECK(std::abs(sector_freq - expected) < 0.04);  // ~3 bootstrap sigma at n = 4000
  }
  fs::remove_all(dir);
}
