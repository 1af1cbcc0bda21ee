#include "windopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windopt {

namespace {

// Abramowitz & Stegun 9.8.1/9.8.3: I0 series below 3.75, e^{-x} I0(x)
// polynomial above. Max relative error below 2e-7, adequate for likelihoods.
double bessel_i0_scaled_large(double x) {
  const double t = 3.75 / x;
  return (0.39894228 + t * (0.01328592 + t * (0.00225319 + t * (-0.00157565 +
          t * (0.00916281 + t * (-0.02057706 + t * (0.02635537 + t * (-0.01647633 +
          t * 0.00392377)))))))) / std::sqrt(x);
}

double bessel_i1_scaled_large(double x) {
  const double t = 3.75 / x;
  return (0.39894228 + t * (-0.03988024 + t * (-0.00362018 + t * (0.00163801 +
          t * (-0.01031555 + t * (0.02282967 + t * (-0.02895312 + t * (0.01787654 -
          t * 0.00420059)))))))) / std::sqrt(x);
}

double bessel_i0_small(double x) {
  const double t = x / 3.75;
  const double t2 = t * t;
  return 1.0 + t2 * (3.5156229 + t2 * (3.0899424 + t2 * (1.2067492 +
         t2 * (0.2659732 + t2 * (0.0360768 + t2 * 0.0045813)))));
}

double bessel_i1_small(double x) {
  const double t = x / 3.75;
  const double t2 = t * t;
  return x * (0.5 + t2 * (0.87890594 + t2 * (0.51498869 + t2 * (0.15084934 +
         t2 * (0.02658733 + t2 * (0.00301532 + t2 * 0.00032411))))));
}

}  // namespace

double log_bessel_i0(double x) {
  x = std::abs(x);
  if (x < 3.75) return std::log(bessel_i0_small(x));
  return x + std::log(bessel_i0_scaled_large(x));
}

double bessel_i1_over_i0(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 3.75) return bessel_i1_small(x) / bessel_i0_small(x);
  return bessel_i1_scaled_large(x) / bessel_i0_scaled_large(x);
}

double von_mises_concentration(double r, double kappa_max) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return kappa_max;
  // Banerjee et al. starting guess, then Newton on A(k) - r with
  // A'(k) = 1 - A(k)^2 - A(k)/k.
  double k = r * (2.0 - r * r) / (1.0 - r * r);
  k = std::clamp(k, 1e-12, kappa_max);
  for (int it = 0; it < 50; ++it) {
    const double a = bessel_i1_over_i0(k);
    const double da = 1.0 - a * a - a / k;
    if (da <= 0.0) break;
    const double step = (a - r) / da;
    k -= step;
    k = std::clamp(k, 1e-12, kappa_max);
    if (std::abs(step) < 1e-12 * (1.0 + k)) break;
  }
  return k;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kendall_tau: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("kendall_tau: need at least 2 pairs");
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      const double p = dx * dy;
      if (p > 0.0) ++concordant;
      else if (p < 0.0) ++discordant;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace windopt
