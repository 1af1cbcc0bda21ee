#include "windopt/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "windopt/copula.hpp"
#include "windopt/stats.hpp"

namespace windopt {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void run_parallel(int n_tasks, int workers, const std::function<void(int)>& task) {
  if (workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto body = [&]() {
    try {
      for (int i = cursor.fetch_add(1); i < n_tasks; i = cursor.fetch_add(1)) task(i);
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, n_tasks);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ObjectiveKind parse_problem(const std::string& problem) {
  if (problem == "prob1") return ObjectiveKind::mean;
  if (problem == "prob2") return ObjectiveKind::cvar;
  if (problem == "prob3") return ObjectiveKind::pwd;
  throw std::invalid_argument("unknown problem: " + problem + " (expected prob1|prob2|prob3)");
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1)
    throw std::runtime_error("config schema_version must be 1");
  RunConfig c;

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    c.wind_data_csv = p.value("wind_data_csv", std::string{});
    c.model_file = p.value("model_file", std::string{});
    c.output_dir = p.value("output_dir", std::string{"."});
  }
  c.problem = j.value("problem", c.problem);
  parse_problem(c.problem);
  c.master_seed = j.value("master_seed", c.master_seed);

  if (j.contains("wind")) {
    const auto& w = j.at("wind");
    c.profile.kappa = w.value("kappa", c.profile.kappa);
    c.profile.coriolis_f = w.value("coriolis_f", c.profile.coriolis_f);
    c.profile.z_min = w.value("z_min", c.profile.z_min);
    c.profile.z_ref = w.value("z_ref", c.profile.z_ref);
    c.z0_lower = w.value("z0_lower", c.z0_lower);
    c.z0_upper = w.value("z0_upper", c.z0_upper);
    c.z0_nominal = w.value("z0_nominal", c.z0_nominal);
  }

  if (j.contains("turbulence")) {
    const auto& t = j.at("turbulence");
    c.spectral.energy_coeff = t.value("energy_coeff", c.spectral.energy_coeff);
    c.spectral.length_scale = t.value("length_scale", c.spectral.length_scale);
    c.spectral.gamma = t.value("gamma", c.spectral.gamma);
    if (t.contains("grid_n"))
      for (int a = 0; a < 3; ++a) c.grid.n[a] = t.at("grid_n").at(a).get<int>();
    if (t.contains("grid_extent"))
      for (int a = 0; a < 3; ++a) c.grid.extent[a] = t.at("grid_extent").at(a).get<double>();
    c.calibrate_intensity = t.value("calibrate_intensity", c.calibrate_intensity);
    c.scale_energy_with_u_star = t.value("scale_energy_with_u_star", c.scale_energy_with_u_star);
  }

  if (j.contains("building")) {
    const auto& b = j.at("building");
    c.geometry.height = b.value("height", c.geometry.height);
    c.geometry.base_semi_major = 0.5 * b.value("base_major_diameter",
                                               2.0 * c.geometry.base_semi_major);
    c.geometry.base_semi_minor = 0.5 * b.value("base_minor_diameter",
                                               2.0 * c.geometry.base_semi_minor);
    c.geometry.roof_area = b.value(
        "roof_area", std::numbers::pi * c.geometry.base_semi_major * c.geometry.base_semi_minor);
    c.geometry.n_strips = b.value("n_strips", c.geometry.n_strips);
  } else {
    c.geometry.roof_area =
        std::numbers::pi * c.geometry.base_semi_major * c.geometry.base_semi_minor;
  }

  if (j.contains("load")) {
    const auto& l = j.at("load");
    c.load.rho = l.value("rho", c.load.rho);
    c.load.window_start = l.value("window_start", c.load.window_start);
    c.load.window_end = l.value("window_end", c.load.window_end);
    c.load.dt = l.value("dt", c.load.dt);
    c.load.advection_speed = l.value("advection_speed", c.load.advection_speed);
    c.load.wrap_time = l.value("wrap_time", c.load.wrap_time);
    c.load.drag.floor = l.value("drag_floor", c.load.drag.floor);
    c.load.drag.amplitude = l.value("drag_amplitude", c.load.drag.amplitude);
    c.load.drag.decay = l.value("drag_decay", c.load.drag.decay);
    c.load.shedding.enabled = l.value("vortex_shedding", c.load.shedding.enabled);
    c.load.shedding.strouhal = l.value("strouhal", c.load.shedding.strouhal);
    c.load.shedding.lift_coefficient = l.value("lift_coefficient",
                                               c.load.shedding.lift_coefficient);
  }
  c.load.profile = c.profile;

  if (j.contains("design")) {
    const auto& d = j.at("design");
    c.optimize_taper = d.value("optimize_taper", c.optimize_taper);
    c.initial_twist_deg = d.value("initial_twist_deg", c.initial_twist_deg);
    c.initial_roof_minor = d.value("initial_roof_minor", c.initial_roof_minor);
    if (d.contains("twist_bounds_deg")) {
      c.twist_bounds_deg[0] = d.at("twist_bounds_deg").at(0).get<double>();
      c.twist_bounds_deg[1] = d.at("twist_bounds_deg").at(1).get<double>();
    }
    if (d.contains("roof_minor_bounds")) {
      c.roof_minor_bounds[0] = d.at("roof_minor_bounds").at(0).get<double>();
      c.roof_minor_bounds[1] = d.at("roof_minor_bounds").at(1).get<double>();
    }
    c.fd_twist_deg = d.value("fd_twist_deg", c.fd_twist_deg);
    c.fd_roof_minor = d.value("fd_roof_minor", c.fd_roof_minor);
  }

  if (j.contains("objective")) c.beta = j.at("objective").value("beta", c.beta);

  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    c.optimizer.step_size = o.value("step_size", c.optimizer.step_size);
    c.optimizer.norm_test_theta = o.value("norm_test_theta", c.optimizer.norm_test_theta);
    c.optimizer.initial_batch = o.value("initial_batch", c.optimizer.initial_batch);
    c.optimizer.max_batch = o.value("max_batch", c.optimizer.max_batch);
    c.optimizer.max_iterations = o.value("max_iterations", c.optimizer.max_iterations);
    c.optimizer.relative_tolerance = o.value("relative_tolerance",
                                             c.optimizer.relative_tolerance);
    c.optimizer.tolerance_window = o.value("tolerance_window", c.optimizer.tolerance_window);
    c.optimizer.workers = o.value("workers", c.optimizer.workers);
    c.optimizer.reuse_samples = o.value("reuse_samples", c.optimizer.reuse_samples);
  }

  if (j.contains("pwd")) {
    const auto& p = j.at("pwd");
    PwdOverride pwd;
    pwd.theta_deg = p.value("theta_deg", pwd.theta_deg);
    pwd.u_star = p.value("u_star", pwd.u_star);
    pwd.z0 = p.value("z0", pwd.z0);
    pwd.seed_u = p.value("seed_u", pwd.seed_u);
    c.pwd = pwd;
  }

  if (j.contains("calibration")) {
    const auto& k = j.at("calibration");
    c.vm_components = k.value("vm_components", c.vm_components);
    if (k.contains("vm_fixed_locations_deg"))
      c.vm_fixed_locations_deg = k.at("vm_fixed_locations_deg").get<std::vector<double>>();
  }
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["paths"] = {{"wind_data_csv", wind_data_csv.string()},
                {"model_file", model_file.string()},
                {"output_dir", output_dir.string()}};
  j["problem"] = problem;
  j["master_seed"] = master_seed;
  j["wind"] = {{"kappa", profile.kappa},     {"coriolis_f", profile.coriolis_f},
               {"z_min", profile.z_min},     {"z_ref", profile.z_ref},
               {"z0_lower", z0_lower},       {"z0_upper", z0_upper},
               {"z0_nominal", z0_nominal}};
  j["turbulence"] = {{"energy_coeff", spectral.energy_coeff},
                     {"length_scale", spectral.length_scale},
                     {"gamma", spectral.gamma},
                     {"grid_n", grid.n},
                     {"grid_extent", grid.extent},
                     {"calibrate_intensity", calibrate_intensity},
                     {"scale_energy_with_u_star", scale_energy_with_u_star}};
  j["building"] = {{"height", geometry.height},
                   {"base_major_diameter", 2.0 * geometry.base_semi_major},
                   {"base_minor_diameter", 2.0 * geometry.base_semi_minor},
                   {"roof_area", geometry.roof_area},
                   {"n_strips", geometry.n_strips}};
  j["load"] = {{"rho", load.rho},
               {"window_start", load.window_start},
               {"window_end", load.window_end},
               {"dt", load.dt},
               {"advection_speed", load.advection_speed},
               {"wrap_time", load.wrap_time},
               {"drag_floor", load.drag.floor},
               {"drag_amplitude", load.drag.amplitude},
               {"drag_decay", load.drag.decay},
               {"vortex_shedding", load.shedding.enabled},
               {"strouhal", load.shedding.strouhal},
               {"lift_coefficient", load.shedding.lift_coefficient}};
  j["design"] = {{"optimize_taper", optimize_taper},
                 {"initial_twist_deg", initial_twist_deg},
                 {"initial_roof_minor", initial_roof_minor},
                 {"twist_bounds_deg", twist_bounds_deg},
                 {"roof_minor_bounds", roof_minor_bounds},
                 {"fd_twist_deg", fd_twist_deg},
                 {"fd_roof_minor", fd_roof_minor}};
  j["objective"] = {{"beta", beta}};
  j["optimizer"] = {{"step_size", optimizer.step_size},
                    {"norm_test_theta", optimizer.norm_test_theta},
                    {"initial_batch", optimizer.initial_batch},
                    {"max_batch", optimizer.max_batch},
                    {"max_iterations", optimizer.max_iterations},
                    {"relative_tolerance", optimizer.relative_tolerance},
                    {"tolerance_window", optimizer.tolerance_window},
                    {"workers", optimizer.workers},
                    {"reuse_samples", optimizer.reuse_samples}};
  if (pwd)
    j["pwd"] = {{"theta_deg", pwd->theta_deg},
                {"u_star", pwd->u_star},
                {"z0", pwd->z0},
                {"seed_u", pwd->seed_u}};
  j["calibration"] = {{"vm_components", vm_components}};
  if (vm_fixed_locations_deg) j["calibration"]["vm_fixed_locations_deg"] = *vm_fixed_locations_deg;
  return j;
}

WindDataset read_wind_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open wind data file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty wind data file");
  // Tolerate a UTF-8 BOM and trailing whitespace on the header.
  if (line.starts_with("\xef\xbb\xbf")) line.erase(0, 3);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  if (line != "timestamp,speed_mps,direction_deg")
    throw std::invalid_argument(
        "wind data header must be 'timestamp,speed_mps,direction_deg', got '" + line + "'");

  WindDataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string ts, speed_s, dir_s, extra;
    if (!std::getline(row, ts, ',') || !std::getline(row, speed_s, ',') ||
        !std::getline(row, dir_s, ','))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 3 fields");
    if (std::getline(row, extra, ','))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": too many fields");
    double speed, dir;
    try {
      std::size_t used = 0;
      speed = std::stod(speed_s, &used);
      if (used != speed_s.size()) throw std::invalid_argument("trailing junk");
      dir = std::stod(dir_s, &used);
      if (used != dir_s.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unparseable number");
    }
    if (!std::isfinite(speed) || speed < 0.0)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": speed must be finite and nonnegative");
    if (!std::isfinite(dir) || dir < 0.0 || dir >= 360.0)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": direction must lie in [0, 360)");
    data.timestamps.push_back(ts);
    data.speeds.push_back(speed);
    data.directions_deg.push_back(dir);
  }
  if (data.size() == 0) throw std::invalid_argument("wind data file has no records");
  return data;
}

WindProblem::WindProblem(ScenarioDistribution dist, RunConfig cfg)
    : dist_(std::move(dist)), cfg_(std::move(cfg)) {
  cfg_.load.profile = cfg_.profile;
  dist_.profile = cfg_.profile;
  dist_.z0_lower = cfg_.z0_lower;
  dist_.z0_upper = cfg_.z0_upper;
  dist_.z0_nominal = cfg_.z0_nominal;

  if (dist_.calibrated()) {
    u_star_nominal_ = friction_velocity_from_speed(dist_.speed.mean(), cfg_.profile.z_ref,
                                                   cfg_.z0_nominal, cfg_.profile);
  } else if (cfg_.pwd) {
    u_star_nominal_ = cfg_.pwd->u_star;
  }

  energy_coeff_nominal_ = cfg_.spectral.energy_coeff;
  if (cfg_.calibrate_intensity) {
    // One-step calibration: the resolved-band variance is linear in the
    // energy coefficient, so a single rescale hits the intensity target
    // I_x(z_ref) = 1 / ln(z_ref / z0_nominal) exactly.
    const double u_ref = mean_wind_speed(cfg_.profile.z_ref, u_star_nominal_, cfg_.z0_nominal,
                                         cfg_.profile);
    const double target_sigma = u_ref / std::log(cfg_.profile.z_ref / cfg_.z0_nominal);
    const double base = resolved_band_variance(cfg_.spectral, cfg_.grid, 0);
    if (base > 0.0)
      energy_coeff_nominal_ = cfg_.spectral.energy_coeff * target_sigma * target_sigma / base;
  }
}

WindScenario WindProblem::draw_scenario(std::uint64_t batch, std::uint64_t index) const {
  Rng rng(derive_seed(cfg_.master_seed, seed_stream::scenario, batch, index));
  return sample_scenario(dist_, rng);
}

WindScenario WindProblem::draw_eval_scenario(std::uint64_t index) const {
  Rng rng(derive_seed(cfg_.master_seed, seed_stream::evaluate, index));
  return sample_scenario(dist_, rng);
}

WindScenario WindProblem::pwd() const {
  if (cfg_.pwd)
    return {cfg_.pwd->u_star, cfg_.pwd->theta_deg * kDeg, cfg_.pwd->z0, cfg_.pwd->seed_u};
  return pwd_scenario(dist_);
}

SpectralParams WindProblem::scenario_spectral(const WindScenario& scenario) const {
  SpectralParams p = cfg_.spectral;
  p.energy_coeff = energy_coeff_nominal_;
  if (cfg_.scale_energy_with_u_star && u_star_nominal_ > 0.0) {
    const double ratio = scenario.u_star / u_star_nominal_;
    p.energy_coeff *= ratio * ratio;
  }
  return p;
}

std::shared_ptr<const TurbulenceBox> WindProblem::box_for(const WindScenario& scenario) const {
  const SpectralParams params = scenario_spectral(scenario);
  const std::uint64_t key =
      mix64(scenario.turbulence_seed() ^ mix64(std::bit_cast<std::uint64_t>(params.energy_coeff)));
  {
    std::scoped_lock lock(cache_mutex_);
    const auto it = box_cache_.find(key);
    if (it != box_cache_.end()) return it->second;
  }
  auto box = std::make_shared<const TurbulenceBox>(
      generate_box(params, cfg_.grid, scenario.turbulence_seed()));
  std::scoped_lock lock(cache_mutex_);
  if (box_cache_.size() >= 16) box_cache_.clear();
  box_cache_.emplace(key, box);
  return box;
}

ObjectiveEvaluation WindProblem::evaluate(const Design& design,
                                          const WindScenario& scenario) const {
  BuildingGeometry geom = cfg_.geometry;
  geom.design = design;
  const auto box = box_for(scenario);
  LoadSeries series = base_moment_series(geom, scenario, *box, cfg_.load);
  return {std::move(series.moment_norm)};
}

double WindProblem::sample_time_average(const Design& design,
                                        const WindScenario& scenario) const {
  return evaluate(design, scenario).mean_value();
}

Design WindProblem::to_design(std::span<const double> v) const {
  Design d;
  d.twist = v[0];
  d.roof_minor = cfg_.optimize_taper && v.size() > 1 ? v[1] : cfg_.initial_roof_minor;
  return d;
}

std::vector<double> WindProblem::initial_design_vector() const {
  std::vector<double> v{cfg_.initial_twist_deg * kDeg};
  if (cfg_.optimize_taper) v.push_back(cfg_.initial_roof_minor);
  return v;
}

ObjectiveSpec WindProblem::objective_spec(ObjectiveKind kind) const {
  ObjectiveSpec spec;
  spec.kind = kind;
  spec.beta = cfg_.beta;
  spec.bounds = {{cfg_.twist_bounds_deg[0] * kDeg, cfg_.twist_bounds_deg[1] * kDeg}};
  if (cfg_.optimize_taper) spec.bounds.push_back(cfg_.roof_minor_bounds);
  return spec;
}

OptimizerConfig WindProblem::optimizer_config() const {
  OptimizerConfig oc = cfg_.optimizer;
  oc.fd_step = {cfg_.fd_twist_deg * kDeg};
  if (cfg_.optimize_taper) oc.fd_step.push_back(cfg_.fd_roof_minor);
  return oc;
}

StochasticObjective WindProblem::objective(ObjectiveKind kind) const {
  StochasticObjective obj;
  obj.deterministic = kind == ObjectiveKind::pwd;
  obj.bind_sample = [this, kind](std::uint64_t batch, std::uint64_t index) -> SampleEvaluator {
    const WindScenario scenario =
        kind == ObjectiveKind::pwd ? pwd() : draw_scenario(batch, index);
    return [this, scenario](std::span<const double> design) {
      return evaluate(to_design(design), scenario);
    };
  };
  return obj;
}

namespace {

ScenarioDistribution load_or_default_model(const RunConfig& cfg, ObjectiveKind kind) {
  if (!cfg.model_file.empty() && std::filesystem::exists(cfg.model_file))
    return load_model(cfg.model_file);
  if (kind == ObjectiveKind::pwd && cfg.pwd) return ScenarioDistribution{};
  throw std::runtime_error("calibrated model file required: " + cfg.model_file.string());
}

}  // namespace

CalibrationReport cmd_calibrate(const RunConfig& cfg, std::ostream& diag) {
  const WindDataset data = read_wind_csv(cfg.wind_data_csv);

  std::vector<double> thetas(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) thetas[i] = data.directions_deg[i] * kDeg;

  CalibrationReport report;
  report.n_records = data.size();
  report.speed_fit = fit_weibull(data.speeds);

  VonMisesFitOptions vm_opts;
  vm_opts.n_components = cfg.vm_components;
  if (cfg.vm_fixed_locations_deg) {
    std::vector<double> locations;
    for (double deg : *cfg.vm_fixed_locations_deg) locations.push_back(deg * kDeg);
    vm_opts.fixed_locations = std::move(locations);
  }
  report.direction_fit = fit_von_mises_mixture(thetas, vm_opts);

  ScenarioDistribution dist;
  dist.speed = report.speed_fit.marginal;
  dist.direction = report.direction_fit.mixture;
  dist.copula = pseudo_observations(thetas, data.speeds, dist.direction, dist.speed);
  dist.z0_lower = cfg.z0_lower;
  dist.z0_upper = cfg.z0_upper;
  dist.z0_nominal = cfg.z0_nominal;
  dist.profile = cfg.profile;

  report.ks_speed = ks_statistic(data.speeds,
                                 [&](double x) { return dist.speed.cdf(x); });
  report.ks_direction = ks_statistic(thetas, [&](double t) { return dist.direction.cdf(t); });
  std::vector<double> us, vs;
  for (const auto& p : dist.copula.points()) {
    us.push_back(p[0]);
    vs.push_back(p[1]);
  }
  report.kendall_tau_pseudo = kendall_tau(us, vs);

  if (!cfg.model_file.empty()) {
    if (cfg.model_file.has_parent_path())
      std::filesystem::create_directories(cfg.model_file.parent_path());
    save_model(dist, cfg.model_file);
    report.model_path = cfg.model_file;
  }

  diag << "records: " << report.n_records << " (dropped nonpositive speeds: "
       << report.speed_fit.dropped_nonpositive << ")\n";
  diag << "weibull: scale=" << report.speed_fit.marginal.scale
       << " shape=" << report.speed_fit.marginal.shape
       << " loglik=" << report.speed_fit.log_likelihood
       << " grad=" << report.speed_fit.gradient_norm << "\n";
  diag << "von mises mixture: " << report.direction_fit.mixture.components().size()
       << " components, loglik=" << report.direction_fit.log_likelihood << " ("
       << report.direction_fit.iterations << " EM iterations)\n";
  for (const auto& c : report.direction_fit.mixture.components())
    diag << "  w=" << c.weight << " mu_deg=" << c.location / kDeg
         << " kappa=" << c.concentration << "\n";
  diag << "ks(speed|weibull)=" << report.ks_speed
       << " ks(direction|mixture)=" << report.ks_direction
       << " kendall_tau=" << report.kendall_tau_pseudo << "\n";
  if (!report.model_path.empty()) diag << "model written: " << report.model_path.string() << "\n";
  return report;
}

void write_record_csv(const std::filesystem::path& path, const OptimizationRecord& record,
                      const WindProblem& problem) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
  if (!out) throw std::runtime_error("cannot open record file: " + path.string());
  out << "iter,psi,a,J,gradnorm,batch,sstar\n";
  for (const auto& it : record.iterations) {
    const Design d = problem.to_design(it.design);
    out << it.iteration << ',' << g17(d.twist / kDeg) << ',' << g17(d.roof_minor) << ','
        << g17(it.objective) << ',' << g17(it.gradient_norm) << ',' << it.batch_size << ','
        << g17(it.s_star) << '\n';
  }
  if (!out) throw std::runtime_error("record file write failed: " + path.string());
}

OptimizeOutcome cmd_optimize(const RunConfig& cfg, std::ostream& diag) {
  const ObjectiveKind kind = parse_problem(cfg.problem);
  WindProblem problem(load_or_default_model(cfg, kind), cfg);

  std::filesystem::create_directories(cfg.output_dir);

  const std::vector<double> z0 = problem.initial_design_vector();
  OptimizationRecord record =
      optimize(z0, problem.objective_spec(kind), problem.optimizer_config(),
               problem.objective(kind));

  OptimizeOutcome outcome;
  outcome.record = std::move(record);
  outcome.record_csv = cfg.output_dir / "record.csv";
  write_record_csv(outcome.record_csv, outcome.record, problem);

  if (outcome.record.iterations.empty())
    throw std::runtime_error("optimization produced no iterations: " + outcome.record.error);

  outcome.initial_design = problem.to_design(outcome.record.iterations.front().design);
  outcome.final_design = problem.to_design(outcome.record.iterations.back().design);
  outcome.objective_initial = outcome.record.iterations.front().objective;
  outcome.objective_final = outcome.record.iterations.back().objective;
  outcome.improvement_ratio = 1.0 - outcome.objective_final / outcome.objective_initial;

  nlohmann::json summary;
  summary["problem"] = cfg.problem;
  summary["master_seed"] = cfg.master_seed;
  summary["beta"] = cfg.beta;
  summary["converged"] = outcome.record.converged;
  summary["aborted"] = outcome.record.aborted;
  if (outcome.record.aborted) summary["error"] = outcome.record.error;
  summary["iterations"] = outcome.record.iterations.size();
  summary["total_samples"] = outcome.record.total_samples();
  summary["J_initial"] = outcome.objective_initial;
  summary["J_final"] = outcome.objective_final;
  summary["improvement_ratio"] = outcome.improvement_ratio;
  summary["final_design"] = {{"twist_deg", outcome.final_design.twist / kDeg},
                             {"roof_minor", outcome.final_design.roof_minor}};
  outcome.summary_json = cfg.output_dir / "summary.json";
  std::ofstream sum(outcome.summary_json, std::ios::binary);
  sum << summary.dump(2) << '\n';

  diag << "problem " << cfg.problem << ": J " << outcome.objective_initial << " -> "
       << outcome.objective_final << " (improvement "
       << 100.0 * outcome.improvement_ratio << "%), " << outcome.record.iterations.size()
       << " iterations, " << outcome.record.total_samples() << " samples"
       << (outcome.record.converged ? "" : " [not converged]") << "\n";
  if (outcome.record.aborted)
    throw std::runtime_error("optimization aborted (partial record at " +
                             outcome.record_csv.string() + "): " + outcome.record.error);
  return outcome;
}

EvaluationReport cmd_evaluate(const RunConfig& cfg, const Design& design, int n_samples,
                              std::ostream& diag) {
  if (n_samples < 1) throw std::invalid_argument("cmd_evaluate: need at least one sample");
  WindProblem problem(load_or_default_model(cfg, ObjectiveKind::mean), cfg);
  std::filesystem::create_directories(cfg.output_dir);

  EvaluationReport report;
  report.n_samples = n_samples;
  report.beta = cfg.beta;
  report.values.resize(n_samples);
  run_parallel(n_samples, cfg.optimizer.workers, [&](int i) {
    report.values[i] =
        problem.sample_time_average(design, problem.draw_eval_scenario(i));
  });

  report.mean = ensemble_mean(report.values);
  if (n_samples >= 2) report.stddev = std_dev(report.values);
  report.var_beta = value_at_risk(report.values, cfg.beta);
  report.cvar_beta = cvar(report.values, cfg.beta).cvar;

  std::vector<double> sorted = report.values;
  std::sort(sorted.begin(), sorted.end());

  report.cdf_csv = cfg.output_dir / "evaluate_cdf.csv";
  {
    std::ofstream out(report.cdf_csv, std::ios::binary);
    out << "value,prob\n";
    for (std::size_t i = 0; i < sorted.size(); ++i)
      out << g17(sorted[i]) << ',' << g17(static_cast<double>(i + 1) / sorted.size()) << '\n';
  }

  report.histogram_csv = cfg.output_dir / "evaluate_histogram.csv";
  {
    const int n_bins = std::max(5, std::min(50, n_samples / 2));
    const double lo = sorted.front();
    const double hi = std::max(sorted.back(), lo + 1e-12);
    std::vector<int> counts(n_bins, 0);
    for (double v : sorted) {
      int b = static_cast<int>((v - lo) / (hi - lo) * n_bins);
      counts[std::clamp(b, 0, n_bins - 1)]++;
    }
    std::ofstream out(report.histogram_csv, std::ios::binary);
    out << "bin_lo,bin_hi,count,frequency\n";
    for (int b = 0; b < n_bins; ++b) {
      const double blo = lo + (hi - lo) * b / n_bins;
      const double bhi = lo + (hi - lo) * (b + 1) / n_bins;
      out << g17(blo) << ',' << g17(bhi) << ',' << counts[b] << ','
          << g17(static_cast<double>(counts[b]) / n_samples) << '\n';
    }
  }

  nlohmann::json j;
  j["n_samples"] = n_samples;
  j["beta"] = cfg.beta;
  j["design"] = {{"twist_deg", design.twist / kDeg}, {"roof_minor", design.roof_minor}};
  j["mean"] = report.mean;
  if (report.stddev)
    j["std"] = *report.stddev;
  else
    j["std"] = nullptr;
  j["var_beta"] = report.var_beta;
  j["cvar_beta"] = report.cvar_beta;
  report.report_json = cfg.output_dir / "evaluate_report.json";
  std::ofstream out(report.report_json, std::ios::binary);
  out << j.dump(2) << '\n';

  diag << "evaluate: n=" << n_samples << " mean=" << report.mean;
  if (report.stddev) diag << " std=" << *report.stddev;
  diag << " VaR_" << cfg.beta << "=" << report.var_beta << " CVaR_" << cfg.beta << "="
       << report.cvar_beta << "\n";
  return report;
}

WindroseTable cmd_windrose(const RunConfig& cfg, int n_samples, std::ostream& diag) {
  if (n_samples < 1) throw std::invalid_argument("cmd_windrose: need at least one sample");
  ScenarioDistribution dist = load_model(cfg.model_file);

  WindroseTable table;
  table.speed_edges = {0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
  const int n_bins = static_cast<int>(table.speed_edges.size());  // last bin open-ended
  table.freq.assign(table.n_sectors, std::vector<double>(n_bins, 0.0));

  const double sector_width = 360.0 / table.n_sectors;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(cfg.master_seed, seed_stream::windrose, i));
    const auto [theta, speed] = sample_joint(dist.copula, dist.direction, dist.speed, rng);
    const double deg = theta / kDeg;
    int sector = static_cast<int>(deg / sector_width) % table.n_sectors;
    if (sector < 0) sector += table.n_sectors;
    int bin = n_bins - 1;
    for (int b = 0; b + 1 < n_bins; ++b)
      if (speed < table.speed_edges[b + 1]) {
        bin = b;
        break;
      }
    table.freq[sector][bin] += 1.0;
  }
  for (auto& row : table.freq)
    for (double& v : row) v /= static_cast<double>(n_samples);

  std::filesystem::create_directories(cfg.output_dir);
  table.csv = cfg.output_dir / "windrose.csv";
  std::ofstream out(table.csv, std::ios::binary);
  out << "sector_start_deg,sector_end_deg,speed_lo,speed_hi,frequency\n";
  for (int s = 0; s < table.n_sectors; ++s)
    for (int b = 0; b < n_bins; ++b) {
      const double hi_edge =
          b + 1 < n_bins ? table.speed_edges[b + 1] : std::numeric_limits<double>::infinity();
      out << g17(s * sector_width) << ',' << g17((s + 1) * sector_width) << ','
          << g17(table.speed_edges[b]) << ',' << g17(hi_edge) << ',' << g17(table.freq[s][b])
          << '\n';
    }

  diag << "windrose: " << n_samples << " samples -> " << table.csv.string() << "\n";
  return table;
}

double WindroseTable::total() const {
  double t = 0.0;
  for (const auto& row : freq)
    for (double v : row) t += v;
  return t;
}

}  // namespace windopt
