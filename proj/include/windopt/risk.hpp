#ifndef WINDOPT_RISK_HPP
#define WINDOPT_RISK_HPP

#include <span>
#include <vector>

namespace windopt {

/// Uniformly sampled scalar time series on [start, start + (n-1)*dt].
struct TimeSeries {
  double start = 0.0;
  double dt = 1.0;
  std::vector<double> values;

  double duration() const { return dt * static_cast<double>(values.size() - 1); }
};

/// Trapezoidal time average over the full series window.
double time_average(const TimeSeries& series);

/// Arithmetic mean over a sample set.
double ensemble_mean(std::span<const double> values);

/// Unbiased sample variance (divisor N-1) and its square root.
double variance(std::span<const double> values);
double std_dev(std::span<const double> values);

/// Variance of the Monte Carlo mean estimator: variance(values)/N.
double estimator_variance(std::span<const double> values);

/// Empirical beta-quantile under the right-continuous CDF convention:
/// the ceil(beta*N)-th order statistic.
double value_at_risk(std::span<const double> values, double beta);

struct CvarResult {
  double cvar;
  double s_star;
};

/// Rockafellar-Uryasev CVaR: min_s { s + mean((x-s)_+)/(1-beta) }, minimized
/// exactly at an order statistic. Reports the minimum and the ceil(beta*N)-th
/// order statistic as the minimizer (unique when beta*N is non-integral, the
/// left endpoint of the flat interval otherwise).
CvarResult cvar(std::span<const double> values, double beta);

/// Time average of the hinge (M(t) - s)_+ over the series window.
double cvar_tail_series(const TimeSeries& series, double s);

/// Composite estimator: ensemble mean of per-sample time averages.
double ensemble_time_average(std::span<const TimeSeries> samples);

}  // namespace windopt

#endif  // WINDOPT_RISK_HPP
