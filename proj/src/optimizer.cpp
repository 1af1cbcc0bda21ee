#include "windopt/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace windopt {

namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

enum class StencilMode { central, forward, backward };

StencilMode stencil_mode(double z, double h, const std::array<double, 2>& bound) {
  const bool up_ok = z + h <= bound[1];
  const bool down_ok = z - h >= bound[0];
  if (up_ok && down_ok) return StencilMode::central;
  if (!up_ok && down_ok) return StencilMode::backward;
  if (up_ok) return StencilMode::forward;
  throw std::invalid_argument("fd step exceeds the bound box width");
}

}  // namespace

double ObjectiveEvaluation::min_value() const {
  return *std::min_element(series.values.begin(), series.values.end());
}

double ObjectiveEvaluation::max_value() const {
  return *std::max_element(series.values.begin(), series.values.end());
}

ObjectiveEvaluation ObjectiveEvaluation::constant(double value) {
  return {TimeSeries{0.0, 1.0, {value, value}}};
}

std::size_t OptimizationRecord::total_samples() const {
  std::size_t total = 0;
  for (const auto& it : iterations) total += static_cast<std::size_t>(it.batch_size);
  return total;
}

double solve_s_star(const std::function<double(double)>& mean_tail, double lo, double hi,
                    double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("solve_s_star: beta in (0,1)");
  if (!(hi > lo)) return lo;
  const double tol = 1e-6 * (hi - lo);
  const auto objective = [&](double s) { return s + mean_tail(s) / (1.0 - beta); };

  double a = lo, b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

double gradient_sample_variance(std::span<const std::vector<double>> per_sample_gradients,
                                std::span<const double> mean_gradient) {
  const std::size_t n = per_sample_gradients.size();
  if (n < 2) throw std::invalid_argument("gradient_sample_variance: need N >= 2");
  double ss = 0.0;
  for (const auto& g : per_sample_gradients) {
    if (g.size() != mean_gradient.size())
      throw std::invalid_argument("gradient_sample_variance: dimension mismatch");
    for (std::size_t d = 0; d < g.size(); ++d) {
      const double diff = g[d] - mean_gradient[d];
      ss += diff * diff;
    }
  }
  return ss / static_cast<double>(n - 1);
}

bool norm_test(std::span<const std::vector<double>> per_sample_gradients,
               std::span<const double> mean_gradient, double theta) {
  const std::size_t n = per_sample_gradients.size();
  if (n < 2) throw std::invalid_argument("norm_test: need N >= 2");
  double g2 = 0.0;
  for (double v : mean_gradient) g2 += v * v;
  const double lhs = gradient_sample_variance(per_sample_gradients, mean_gradient) /
                     static_cast<double>(n);
  return lhs <= theta * theta * g2;
}

int next_batch_size(std::span<const std::vector<double>> per_sample_gradients,
                    std::span<const double> mean_gradient, double theta, int current,
                    int max_batch) {
  double g2 = 0.0;
  for (double v : mean_gradient) g2 += v * v;
  if (g2 == 0.0) return max_batch;
  const double var = gradient_sample_variance(per_sample_gradients, mean_gradient);
  const double raw = std::ceil(var / (theta * theta * g2));
  const double clamped = std::min(static_cast<double>(max_batch),
                                  std::max(raw, static_cast<double>(current + 1)));
  return static_cast<int>(clamped);
}

std::vector<double> sgd_step(std::span<const double> design, std::span<const double> gradient,
                             double alpha, std::span<const std::array<double, 2>> bounds) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sgd_step: step size must be positive");
  if (design.size() != gradient.size() || design.size() != bounds.size())
    throw std::invalid_argument("sgd_step: dimension mismatch");
  std::vector<double> next(design.size());
  for (std::size_t d = 0; d < design.size(); ++d)
    next[d] = std::clamp(design[d] - alpha * gradient[d], bounds[d][0], bounds[d][1]);
  return next;
}

std::vector<double> fd_gradient(const SampleEvaluator& evaluator,
                                std::span<const double> design,
                                const std::function<double(const ObjectiveEvaluation&)>& value_of,
                                std::span<const double> fd_step,
                                std::span<const std::array<double, 2>> bounds) {
  if (design.size() != fd_step.size() || design.size() != bounds.size())
    throw std::invalid_argument("fd_gradient: dimension mismatch");
  for (double h : fd_step)
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: increments must be positive");

  std::vector<double> z(design.begin(), design.end());
  std::vector<double> grad(design.size());
  for (std::size_t d = 0; d < design.size(); ++d) {
    const double h = fd_step[d];
    const StencilMode mode = stencil_mode(z[d], h, bounds[d]);
    const double saved = z[d];
    switch (mode) {
      case StencilMode::central: {
        z[d] = saved + h;
        const double up = value_of(evaluator(z));
        z[d] = saved - h;
        const double down = value_of(evaluator(z));
        grad[d] = (up - down) / (2.0 * h);
        break;
      }
      case StencilMode::forward: {
        const double base = value_of(evaluator(z));
        z[d] = saved + h;
        grad[d] = (value_of(evaluator(z)) - base) / h;
        break;
      }
      case StencilMode::backward: {
        const double base = value_of(evaluator(z));
        z[d] = saved - h;
        grad[d] = (base - value_of(evaluator(z))) / h;
        break;
      }
    }
    z[d] = saved;
  }
  return grad;
}

namespace {

struct SampleResult {
  ObjectiveEvaluation base;
  // Stencil evaluations per coordinate: [0] = +h (or base for backward),
  // [1] = -h (or base for forward), mirroring fd assembly below.
  std::vector<std::array<ObjectiveEvaluation, 2>> stencil;
};

}  // namespace

OptimizationRecord optimize(std::span<const double> initial_design, const ObjectiveSpec& spec,
                            const OptimizerConfig& config, const StochasticObjective& objective) {
  const std::size_t dim = initial_design.size();
  if (dim == 0) throw std::invalid_argument("optimize: empty design");
  if (spec.bounds.size() != dim || config.fd_step.size() != dim)
    throw std::invalid_argument("optimize: bounds/fd_step dimension mismatch");
  if (!(config.norm_test_theta > 0.0 && config.norm_test_theta < 1.0))
    throw std::invalid_argument("optimize: norm-test constant must lie in (0, 1)");
  if (!(config.step_size > 0.0)) throw std::invalid_argument("optimize: step size must be positive");
  const bool deterministic = objective.deterministic || spec.kind == ObjectiveKind::pwd;
  if (!deterministic && config.initial_batch < 2)
    throw std::invalid_argument("optimize: stochastic runs need an initial batch of >= 2");

  std::vector<double> design(initial_design.begin(), initial_design.end());
  std::vector<StencilMode> modes(dim);

  OptimizationRecord record;
  int batch = deterministic ? 1 : config.initial_batch;

  try {
    for (int k = 0; k < config.max_iterations; ++k) {
      for (std::size_t d = 0; d < dim; ++d)
        modes[d] = stencil_mode(design[d], config.fd_step[d], spec.bounds[d]);

      // Evaluate the batch: base series plus the full FD stencil per sample,
      // all under the sample's own scenario (common random numbers).
      const std::uint64_t batch_tag = config.reuse_samples ? 0 : static_cast<std::uint64_t>(k);
      std::vector<SampleResult> results(batch);
      std::atomic<int> cursor{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;

      const auto worker = [&]() {
        try {
          for (int i = cursor.fetch_add(1); i < batch; i = cursor.fetch_add(1)) {
            const SampleEvaluator eval = objective.bind_sample(batch_tag, i);
            SampleResult r;
            r.base = eval(design);
            r.stencil.resize(dim);
            std::vector<double> z = design;
            for (std::size_t d = 0; d < dim; ++d) {
              const double saved = z[d];
              const double h = config.fd_step[d];
              if (modes[d] != StencilMode::backward) {
                z[d] = saved + h;
                r.stencil[d][0] = eval(z);
              } else {
                r.stencil[d][0] = r.base;
              }
              if (modes[d] != StencilMode::forward) {
                z[d] = saved - h;
                r.stencil[d][1] = eval(z);
              } else {
                r.stencil[d][1] = r.base;
              }
              z[d] = saved;
            }
            results[i] = std::move(r);
          }
        } catch (...) {
          std::scoped_lock lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      };

      if (config.workers > 1) {
        std::vector<std::thread> pool;
        const int n_threads = std::min(config.workers, batch);
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
      } else {
        worker();
      }
      if (failure) std::rethrow_exception(failure);

      // CVaR scalarization point from the base evaluations.
      double s_star = std::numeric_limits<double>::quiet_NaN();
      if (spec.kind == ObjectiveKind::cvar) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& r : results) {
          lo = std::min(lo, r.base.min_value());
          hi = std::max(hi, r.base.max_value());
        }
        const auto mean_tail = [&](double s) {
          double sum = 0.0;
          for (const auto& r : results) sum += r.base.tail_value(s);
          return sum / static_cast<double>(batch);
        };
        s_star = solve_s_star(mean_tail, lo, hi, spec.beta);
      }

      const auto value_of = [&](const ObjectiveEvaluation& e) {
        return spec.kind == ObjectiveKind::cvar ? e.tail_value(s_star) : e.mean_value();
      };

      // Per-sample values and FD gradients from the stored stencils.
      std::vector<double> values(batch);
      std::vector<std::vector<double>> gradients(batch);
      for (int i = 0; i < batch; ++i) {
        values[i] = value_of(results[i].base);
        std::vector<double> g(dim);
        for (std::size_t d = 0; d < dim; ++d) {
          const double h = config.fd_step[d];
          const double up = value_of(results[i].stencil[d][0]);
          const double down = value_of(results[i].stencil[d][1]);
          g[d] = (up - down) / (modes[d] == StencilMode::central ? 2.0 * h : h);
        }
        gradients[i] = std::move(g);
      }

      std::vector<double> mean_grad(dim, 0.0);
      for (const auto& g : gradients)
        for (std::size_t d = 0; d < dim; ++d) mean_grad[d] += g[d];
      for (double& v : mean_grad) v /= static_cast<double>(batch);

      double grad_norm = 0.0;
      for (double v : mean_grad) grad_norm += v * v;
      grad_norm = std::sqrt(grad_norm);

      IterationRecord it;
      it.iteration = k;
      it.design = design;
      it.batch_size = batch;
      it.s_star = s_star;
      it.gradient = mean_grad;
      it.gradient_norm = grad_norm;
      it.gradient_sample_variance =
          batch >= 2 ? gradient_sample_variance(gradients, mean_grad) : 0.0;

      const double mean_value = ensemble_mean(values);
      it.objective = spec.kind == ObjectiveKind::cvar
                         ? s_star + mean_value / (1.0 - spec.beta)
                         : mean_value;
      record.iterations.push_back(std::move(it));

      // Convergence: the objective moved less than the relative tolerance
      // against every iterate in the trailing window.
      const int n_rec = static_cast<int>(record.iterations.size());
      if (n_rec > config.tolerance_window) {
        const double current = record.iterations.back().objective;
        bool settled = true;
        for (int j = n_rec - 1 - config.tolerance_window; j < n_rec - 1; ++j) {
          const double past = record.iterations[j].objective;
          if (std::abs(current - past) >
              config.relative_tolerance * std::max(std::abs(past), 1e-300)) {
            settled = false;
            break;
          }
        }
        if (settled) {
          record.converged = true;
          break;
        }
      }

      design = sgd_step(design, mean_grad, config.step_size, spec.bounds);

      if (!deterministic) {
        if (!norm_test(gradients, mean_grad, config.norm_test_theta))
          batch = next_batch_size(gradients, mean_grad, config.norm_test_theta, batch,
                                  config.max_batch);
      }
    }
  } catch (const std::exception& e) {
    record.aborted = true;
    record.error = e.what();
  }
  return record;
}

}  // namespace windopt
