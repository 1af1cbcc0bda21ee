#include "windopt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windopt {

namespace {

void check_series(const TimeSeries& series) {
  if (series.values.size() < 2)
    throw std::invalid_argument("time series needs at least 2 points");
  if (!(series.dt > 0.0)) throw std::invalid_argument("time series dt must be positive");
  for (double v : series.values)
    if (!std::isfinite(v)) throw std::invalid_argument("time series contains non-finite value");
}

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("confidence level beta must lie in (0, 1)");
}

}  // namespace

double time_average(const TimeSeries& series) {
  check_series(series);
  const std::size_t n = series.values.size();
  double sum = 0.5 * (series.values.front() + series.values.back());
  for (std::size_t i = 1; i + 1 < n; ++i) sum += series.values[i];
  return sum / static_cast<double>(n - 1);
}

double ensemble_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("ensemble_mean: empty sample set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
  const double mean = ensemble_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

double std_dev(std::span<const double> values) { return std::sqrt(variance(values)); }

double estimator_variance(std::span<const double> values) {
  return variance(values) / static_cast<double>(values.size());
}

double value_at_risk(std::span<const double> values, double beta) {
  check_beta(beta);
  if (values.empty()) throw std::invalid_argument("value_at_risk: empty sample set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(beta * n));
  return sorted[std::max<std::size_t>(rank, 1) - 1];
}

CvarResult cvar(std::span<const double> values, double beta) {
  check_beta(beta);
  if (values.empty()) throw std::invalid_argument("cvar: empty sample set");
  const double s = value_at_risk(values, beta);
  double hinge = 0.0;
  for (double v : values) hinge += std::max(v - s, 0.0);
  hinge /= static_cast<double>(values.size());
  return {s + hinge / (1.0 - beta), s};
}

double cvar_tail_series(const TimeSeries& series, double s) {
  TimeSeries hinged = series;
  for (double& v : hinged.values) v = std::max(v - s, 0.0);
  return time_average(hinged);
}

double ensemble_time_average(std::span<const TimeSeries> samples) {
  if (samples.empty()) throw std::invalid_argument("ensemble_time_average: empty sample set");
  std::vector<double> averages;
  averages.reserve(samples.size());
  for (const TimeSeries& s : samples) averages.push_back(time_average(s));
  return ensemble_mean(averages);
}

}  // namespace windopt
