#ifndef WINDOPT_OPTIMIZER_HPP
#define WINDOPT_OPTIMIZER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "windopt/risk.hpp"

namespace windopt {

enum class ObjectiveKind {
  mean,  // expected time-averaged load (Prob. 1)
  cvar,  // conditional value-at-risk of the load (Prob. 2)
  pwd,   // deterministic predominant-wind-direction run (Prob. 3)
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::mean;
  double beta = 0.90;
  std::vector<std::array<double, 2>> bounds;  // per-coordinate box
};

struct OptimizerConfig {
  double step_size = 0.1;
  double norm_test_theta = 0.5;  // in (0, 1)
  int initial_batch = 2;
  int max_batch = 64;
  int max_iterations = 200;
  double relative_tolerance = 0.01;
  int tolerance_window = 3;  // consecutive-iteration window for the J change
  std::vector<double> fd_step;
  int workers = 1;
  bool reuse_samples = false;  // opt-in: keep batch 0's scenarios forever
};

/// One stochastic sample's response at a fixed design: the windowed load
/// series (a constant 2-point series for scalar test objectives).
struct ObjectiveEvaluation {
  TimeSeries series;

  double mean_value() const { return time_average(series); }
  double tail_value(double s) const { return cvar_tail_series(series, s); }
  double min_value() const;
  double max_value() const;

  static ObjectiveEvaluation constant(double value);
};

/// Evaluator bound to one scenario; calls at different designs share the
/// scenario (common random numbers across the FD stencil).
using SampleEvaluator = std::function<ObjectiveEvaluation(std::span<const double>)>;

/// Type-erased stochastic objective. bind_sample(batch, index) must be
/// deterministic so records reproduce bit-for-bit under one master seed.
struct StochasticObjective {
  std::function<SampleEvaluator(std::uint64_t batch, std::uint64_t index)> bind_sample;
  bool deterministic = false;  // pwd-style: one scenario, batch pinned at 1
};

struct IterationRecord {
  int iteration = 0;
  std::vector<double> design;
  double objective = 0.0;
  std::vector<double> gradient;
  double gradient_norm = 0.0;
  double gradient_sample_variance = 0.0;  // summed per-coordinate, divisor N-1
  int batch_size = 0;
  double s_star = 0.0;  // NaN for non-CVaR runs
};

struct OptimizationRecord {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  bool aborted = false;
  std::string error;

  std::size_t total_samples() const;
};

/// Minimizer of s + mean_tail(s)/(1-beta) by golden-section search on
/// [lo, hi], tolerance 1e-6*(hi-lo). Degenerate brackets return lo.
double solve_s_star(const std::function<double(double)>& mean_tail, double lo, double hi,
                    double beta);

/// Norm test: Var_S(grad_i)/N <= theta^2 |mean_grad|^2.
bool norm_test(std::span<const std::vector<double>> per_sample_gradients,
               std::span<const double> mean_gradient, double theta);

/// Batch size prescribed after a failed norm test:
/// ceil(Var_S / (theta^2 |g|^2)), clamped to [current+1, max_batch]; a zero
/// mean gradient returns max_batch.
int next_batch_size(std::span<const std::vector<double>> per_sample_gradients,
                    std::span<const double> mean_gradient, double theta, int current,
                    int max_batch);

/// Summed per-coordinate unbiased sample variance of the gradient set.
double gradient_sample_variance(std::span<const std::vector<double>> per_sample_gradients,
                                std::span<const double> mean_gradient);

/// Projected gradient step: clamp(design - alpha * gradient, bounds).
std::vector<double> sgd_step(std::span<const double> design, std::span<const double> gradient,
                             double alpha, std::span<const std::array<double, 2>> bounds);

/// Central-difference gradient of value_of(evaluation(design)), reusing the
/// bound scenario at every stencil point; one-sided at the box boundary.
std::vector<double> fd_gradient(const SampleEvaluator& evaluator,
                                std::span<const double> design,
                                const std::function<double(const ObjectiveEvaluation&)>& value_of,
                                std::span<const double> fd_step,
                                std::span<const std::array<double, 2>> bounds);

/// Stochastic gradient descent with norm-test adaptive sampling. Stops when
/// the objective estimate changes by less than relative_tolerance against
/// each of the previous tolerance_window iterates, or at max_iterations.
/// Evaluation failures abort with the partial record preserved.
///
/// Per-sample objectives are the time-averaged load (mean/pwd) or the
/// time-averaged hinge at the batch's s_star (cvar); gradients average those
/// per-sample finite differences. The recorded cvar objective is the full
/// Rockafellar-Uryasev value s_star + mean_tail(s_star)/(1-beta).
OptimizationRecord optimize(std::span<const double> initial_design, const ObjectiveSpec& spec,
                            const OptimizerConfig& config, const StochasticObjective& objective);

}  // namespace windopt

#endif  // WINDOPT_OPTIMIZER_HPP
