#ifndef WINDOPT_WORKFLOW_HPP
#define WINDOPT_WORKFLOW_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "windopt/marginals.hpp"
#include "windopt/optimizer.hpp"
#include "windopt/scenario.hpp"
#include "windopt/surrogate.hpp"

namespace windopt {

/// Explicit predominant-wind-direction values for prob3 runs without a
/// calibrated model.
struct PwdOverride {
  double theta_deg = 260.0;
  double u_star = 10.0;
  double z0 = 0.05;
  double seed_u = kPwdSeed;
};

/// Full run configuration; JSON round-trip with a versioned schema.
/// Angles live in degrees here (the I/O boundary) and in radians everywhere
/// past it.
struct RunConfig {
  RunConfig() { load.wrap_time = true; }  // the workflow opts into periodic slicing

  std::filesystem::path wind_data_csv;
  std::filesystem::path model_file;
  std::filesystem::path output_dir = ".";
  std::string problem = "prob1";  // prob1 | prob2 | prob3
  std::uint64_t master_seed = 1;

  MeanProfileConfig profile;
  double z0_lower = 0.01;
  double z0_upper = 0.1;
  double z0_nominal = 0.05;

  // Spectral synthesis. energy_coeff is a pre-calibration value; with
  // calibrate_intensity set it is rescaled so I_x(z_ref) matches the
  // codebook curve 1/ln(z_ref/z0_nominal) at the nominal friction velocity.
  SpectralParams spectral{0.1, 60.0, 0.0};
  GridSpec grid{{128, 32, 32}, {2400.0, 240.0, 240.0}};
  bool calibrate_intensity = true;
  bool scale_energy_with_u_star = true;

  BuildingGeometry geometry;
  LoadConfig load;

  double beta = 0.90;
  bool optimize_taper = true;  // false: twist-only (Study-I style)
  double initial_twist_deg = 160.0;
  double initial_roof_minor = 20.0;
  std::array<double, 2> twist_bounds_deg{0.0, 360.0};
  std::array<double, 2> roof_minor_bounds{12.0, 48.0};
  double fd_twist_deg = 1.0;
  double fd_roof_minor = 0.1;
  OptimizerConfig optimizer;

  std::optional<PwdOverride> pwd;

  // Calibration knobs.
  int vm_components = 4;
  std::optional<std::vector<double>> vm_fixed_locations_deg;

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// One row of the wind-record CSV (`timestamp,speed_mps,direction_deg`).
struct WindDataset {
  std::vector<std::string> timestamps;
  std::vector<double> speeds;
  std::vector<double> directions_deg;

  std::size_t size() const { return speeds.size(); }
};

/// Parses the wind-record CSV; malformed rows raise errors naming the line.
WindDataset read_wind_csv(const std::filesystem::path& path);

/// The stochastic wind-load objective: scenario draws, per-scenario
/// turbulence boxes (cached per seed), and strip-surrogate load series.
class WindProblem {
 public:
  WindProblem(ScenarioDistribution dist, RunConfig cfg);

  const ScenarioDistribution& distribution() const { return dist_; }
  const RunConfig& config() const { return cfg_; }
  double energy_coeff_nominal() const { return energy_coeff_nominal_; }
  double u_star_nominal() const { return u_star_nominal_; }

  /// Scenario streams: optimizer batches and evaluation draws never collide.
  WindScenario draw_scenario(std::uint64_t batch, std::uint64_t index) const;
  WindScenario draw_eval_scenario(std::uint64_t index) const;
  WindScenario pwd() const;

  /// Windowed load-norm series for one (design, scenario) pair.
  ObjectiveEvaluation evaluate(const Design& design, const WindScenario& scenario) const;
  double sample_time_average(const Design& design, const WindScenario& scenario) const;

  StochasticObjective objective(ObjectiveKind kind) const;
  ObjectiveSpec objective_spec(ObjectiveKind kind) const;
  OptimizerConfig optimizer_config() const;

  std::vector<double> initial_design_vector() const;
  Design to_design(std::span<const double> v) const;

 private:
  SpectralParams scenario_spectral(const WindScenario& scenario) const;
  std::shared_ptr<const TurbulenceBox> box_for(const WindScenario& scenario) const;

  ScenarioDistribution dist_;
  RunConfig cfg_;
  double u_star_nominal_ = 1.0;
  double energy_coeff_nominal_ = 0.1;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<const TurbulenceBox>> box_cache_;
};

struct CalibrationReport {
  std::size_t n_records = 0;
  WeibullFit speed_fit;
  VonMisesFit direction_fit;
  double ks_speed = 0.0;
  double ks_direction = 0.0;
  double kendall_tau_pseudo = 0.0;
  std::filesystem::path model_path;
};

/// calibrate: CSV -> fitted marginals + empirical copula -> model file,
/// with fit diagnostics on the stream.
CalibrationReport cmd_calibrate(const RunConfig& cfg, std::ostream& diag);

struct OptimizeOutcome {
  OptimizationRecord record;
  Design initial_design;
  Design final_design;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  double improvement_ratio = 0.0;  // 1 - J_final / J_initial
  std::filesystem::path record_csv;
  std::filesystem::path summary_json;
};

/// optimize: run the configured problem; stream the record to CSV
/// (`iter,psi,a,J,gradnorm,batch,sstar`) and a summary JSON. The partial
/// record is flushed even when the run aborts.
OptimizeOutcome cmd_optimize(const RunConfig& cfg, std::ostream& diag);

struct EvaluationReport {
  int n_samples = 0;
  double beta = 0.90;
  double mean = 0.0;
  std::optional<double> stddev;  // absent for n = 1
  double var_beta = 0.0;
  double cvar_beta = 0.0;
  std::vector<double> values;  // per-sample time-averaged load norms
  std::filesystem::path report_json;
  std::filesystem::path histogram_csv;
  std::filesystem::path cdf_csv;
};

/// evaluate: Monte Carlo statistics of a fixed design plus histogram/CDF
/// data files for external plotting.
EvaluationReport cmd_evaluate(const RunConfig& cfg, const Design& design, int n_samples,
                              std::ostream& diag);

struct WindroseTable {
  int n_sectors = 12;
  std::vector<double> speed_edges;       // ascending; last bin is open-ended
  std::vector<std::vector<double>> freq;  // [sector][speed bin]
  std::filesystem::path csv;

  double total() const;
};

/// windrose: 30-degree-sector by speed-bin joint frequency table from the
/// calibrated model.
WindroseTable cmd_windrose(const RunConfig& cfg, int n_samples, std::ostream& diag);

/// Record CSV writer, exposed for the determinism checks.
void write_record_csv(const std::filesystem::path& path, const OptimizationRecord& record,
                      const WindProblem& problem);

}  // namespace windopt

#endif  // WINDOPT_WORKFLOW_HPP
