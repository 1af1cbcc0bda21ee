#include <cstdint>
#include <exception>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "windopt/workflow.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitRuntimeFailure = 2;

windopt::RunConfig load_config(const std::string& path, const std::string& out_dir,
                               std::uint64_t seed, bool seed_set, int workers) {
  windopt::RunConfig cfg =
      path.empty() ? windopt::RunConfig{} : windopt::RunConfig::from_file(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed_set) cfg.master_seed = seed;
  if (workers > 0) cfg.optimizer.workers = workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-averse shape optimization of tall buildings under uncertain wind"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "fit marginals and copula from wind records");
  std::string data_csv, model_out;
  int components = 0;
  calibrate->add_option("--data", data_csv, "wind record CSV (timestamp,speed_mps,direction_deg)");
  calibrate->add_option("--out", model_out, "calibrated model output file");
  calibrate->add_option("--components", components, "von Mises mixture components");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "run the configured optimization problem");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo statistics of a fixed design");
  double eval_twist_deg = 0.0, eval_roof_minor = 0.0;
  int eval_samples = 30;
  evaluate->add_option("--twist-deg", eval_twist_deg, "design twist (degrees)")->required();
  evaluate->add_option("--roof-minor", eval_roof_minor, "roof minor diameter (m)");
  evaluate->add_option("--samples", eval_samples, "number of Monte Carlo samples");

  // windrose
  auto* windrose = app.add_subcommand("windrose", "sector frequency table from the model");
  std::string rose_model;
  int rose_samples = 2500;
  windrose->add_option("--model", rose_model, "calibrated model file");
  windrose->add_option("--samples", rose_samples, "number of joint draws");

  for (auto* sub : {calibrate, optimize, evaluate, windrose}) {
    sub->add_option("--config,-c", config_path, "run configuration (JSON)");
    sub->add_option("--out-dir", out_dir, "output directory override");
    sub->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--workers", workers, "worker threads for sample evaluation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUserError;
  }

  try {
    windopt::RunConfig cfg = load_config(config_path, out_dir, seed, seed_set, workers);

    if (calibrate->parsed()) {
      if (!data_csv.empty()) cfg.wind_data_csv = data_csv;
      if (!model_out.empty()) cfg.model_file = model_out;
      if (components > 0) cfg.vm_components = components;
      if (cfg.wind_data_csv.empty()) throw std::invalid_argument("calibrate needs --data or paths.wind_data_csv");
      if (cfg.model_file.empty()) throw std::invalid_argument("calibrate needs --out or paths.model_file");
      windopt::cmd_calibrate(cfg, std::cout);
    } else if (optimize->parsed()) {
      windopt::cmd_optimize(cfg, std::cout);
    } else if (evaluate->parsed()) {
      windopt::Design design;
      design.twist = eval_twist_deg * std::numbers::pi / 180.0;
      design.roof_minor = eval_roof_minor > 0.0 ? eval_roof_minor : cfg.initial_roof_minor;
      windopt::cmd_evaluate(cfg, design, eval_samples, std::cout);
    } else if (windrose->parsed()) {
      if (!rose_model.empty()) cfg.model_file = rose_model;
      if (cfg.model_file.empty()) throw std::invalid_argument("windrose needs --model or paths.model_file");
      windopt::cmd_windrose(cfg, rose_samples, std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
  return kExitOk;
}
