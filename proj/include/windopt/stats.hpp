#ifndef WINDOPT_STATS_HPP
#define WINDOPT_STATS_HPP

#include <functional>
#include <span>
#include <vector>

namespace windopt {

/// log I0(x), the modified Bessel function of order zero. Series for small x,
/// scaled Abramowitz-Stegun polynomial for large x (never overflows).
double log_bessel_i0(double x);

/// A(x) = I1(x)/I0(x), the mean resultant length of a von Mises distribution
/// with concentration x. Monotone from 0 to 1 on [0, inf).
double bessel_i1_over_i0(double x);

/// Inverse of bessel_i1_over_i0: concentration from mean resultant length.
/// Clamped to [0, kappa_max]; r >= 1 maps to kappa_max.
double von_mises_concentration(double r, double kappa_max = 1e3);

/// Two-sided Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)| of a sample
/// against a reference CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Kendall rank correlation of paired samples. O(n^2) pair enumeration;
/// ties count zero.
double kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace windopt

#endif  // WINDOPT_STATS_HPP
