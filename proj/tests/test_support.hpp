#ifndef WINDOPT_TEST_SUPPORT_HPP
#define WINDOPT_TEST_SUPPORT_HPP

// Independent oracles for the test suites: these deliberately avoid the
// library code paths they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "windopt/optimizer.hpp"
#include "windopt/rng.hpp"

namespace windopt::testing {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Weibull quantile, written out directly from the definition.
inline double weibull_quantile(double p, double scale, double shape) {
  return scale * std::pow(-std::log(1.0 - p), 1.0 / shape);
}

/// Von Mises sampler (Best & Fisher 1979 rejection scheme).
inline double sample_von_mises(double mu, double kappa, Rng& rng) {
  if (kappa < 1e-9) return rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double z = std::cos(std::numbers::pi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (c / u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double u3 = rng.uniform();
  double theta = mu + (u3 > 0.5 ? 1.0 : -1.0) * std::acos(std::clamp(f, -1.0, 1.0));
  theta = std::fmod(theta, 2.0 * std::numbers::pi);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return theta;
}

/// Von Mises CDF on [0, 2*pi) by direct trapezoid quadrature of the density
/// (series-evaluated I0), independent of the library tabulation.
class VonMisesCdfOracle {
 public:
  VonMisesCdfOracle(double mu, double kappa) {
    double i0 = 1.0, term = 1.0;
    for (int n = 1; n < 200; ++n) {
      term *= (kappa * kappa) / (4.0 * static_cast<double>(n) * n);
      i0 += term;
      if (term < 1e-17 * i0) break;
    }
    const double norm = 1.0 / (2.0 * std::numbers::pi * i0);
    table_.resize(kGrid + 1, 0.0);
    double prev = norm * std::exp(kappa * std::cos(0.0 - mu));
    for (int i = 1; i <= kGrid; ++i) {
      const double t = 2.0 * std::numbers::pi * i / kGrid;
      const double cur = norm * std::exp(kappa * std::cos(t - mu));
      table_[i] = table_[i - 1] + 0.5 * (2.0 * std::numbers::pi / kGrid) * (prev + cur);
      prev = cur;
    }
    for (double& v : table_) v /= table_.back();
  }

  double cdf(double theta) const {
    double t = std::fmod(theta, 2.0 * std::numbers::pi);
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    const double pos = t / (2.0 * std::numbers::pi) * kGrid;
    const int i = std::min(static_cast<int>(pos), kGrid - 1);
    return table_[i] + (pos - i) * (table_[i + 1] - table_[i]);
  }

  double quantile(double p) const {
    double lo = 0.0, hi = 2.0 * std::numbers::pi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  static constexpr int kGrid = 8192;
  std::vector<double> table_;
};

/// Synthetic "Basel-style" wind records: Weibull speeds, one-mode von Mises
/// directions, Gaussian-copula dependence with Kendall tau = (2/pi) asin(rho).
struct SyntheticWindData {
  std::vector<double> speeds;
  std::vector<double> directions_rad;
};

inline SyntheticWindData make_dependent_wind_data(std::size_t n, double weibull_scale,
                                                  double weibull_shape, double vm_mu,
                                                  double vm_kappa, double gauss_rho,
                                                  std::uint64_t seed) {
  SyntheticWindData data;
  data.speeds.reserve(n);
  data.directions_rad.reserve(n);
  const VonMisesCdfOracle vm(vm_mu, vm_kappa);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.normal();
    const double z2 = gauss_rho * z1 + std::sqrt(1.0 - gauss_rho * gauss_rho) * rng.normal();
    const double u = std::clamp(normal_cdf(z1), 1e-12, 1.0 - 1e-12);
    const double v = std::clamp(normal_cdf(z2), 1e-12, 1.0 - 1e-12);
    data.directions_rad.push_back(vm.quantile(u));
    data.speeds.push_back(weibull_quantile(v, weibull_scale, weibull_shape));
  }
  return data;
}

/// Real eigenvalues of a 3x3 Hermitian matrix, descending, via the
/// trigonometric closed form.
inline std::array<double, 3> hermitian_eigenvalues(
    const std::array<std::array<std::complex<double>, 3>, 3>& a) {
  const double p1 = std::norm(a[0][1]) + std::norm(a[0][2]) + std::norm(a[1][2]);
  const double q = (a[0][0].real() + a[1][1].real() + a[2][2].real()) / 3.0;
  const double p2 = (a[0][0].real() - q) * (a[0][0].real() - q) +
                    (a[1][1].real() - q) * (a[1][1].real() - q) +
                    (a[2][2].real() - q) * (a[2][2].real() - q) + 2.0 * p1;
  if (p2 < 1e-300) return {q, q, q};
  const double p = std::sqrt(p2 / 6.0);

  std::array<std::array<std::complex<double>, 3>, 3> b;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      b[i][j] = (a[i][j] - (i == j ? std::complex<double>(q, 0.0) : 0.0)) / p;

  const std::complex<double> det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                                   b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                                   b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(det.real() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {e1, 3.0 * q - e1 - e3, e3};
}

/// Synthetic stochastic benchmark with a known optimum:
///   J_i(z) = offset + 1/2 sum_d a_d (z_d - z*_d)^2 + sum_d xi_d (z_d - z*_d),
/// with xi ~ N(0, sigma^2) per sample. The per-sample gradient is
/// a (z - z*) + xi: additive Gaussian gradient noise that vanishes in
/// expectation, the classic adaptive-sampling test problem.
struct NoisyQuadratic {
  std::vector<double> optimum{0.4, 0.9};
  std::vector<double> curvature{4.0, 4.0};
  double offset = 0.1;
  double noise_sigma = 0.2;
  std::uint64_t seed = 1;

  StochasticObjective objective() const {
    StochasticObjective obj;
    const NoisyQuadratic self = *this;
    obj.bind_sample = [self](std::uint64_t batch, std::uint64_t index) -> SampleEvaluator {
      Rng rng(derive_seed(self.seed, 7, batch, index));
      std::vector<double> xi(self.optimum.size());
      for (double& v : xi) v = self.noise_sigma * rng.normal();
      return [self, xi](std::span<const double> z) {
        double value = self.offset;
        for (std::size_t d = 0; d < z.size(); ++d) {
          const double r = z[d] - self.optimum[d];
          value += 0.5 * self.curvature[d] * r * r + xi[d] * r;
        }
        return ObjectiveEvaluation::constant(value);
      };
    };
    return obj;
  }

  double distance_to_optimum(std::span<const double> z) const {
    double s = 0.0;
    for (std::size_t d = 0; d < z.size(); ++d)
      s += (z[d] - optimum[d]) * (z[d] - optimum[d]);
    return std::sqrt(s);
  }
};

/// 2F1(1/3, 17/6; 4/3; -y) via the Pfaff transform series; the reference
/// for the eddy-lifetime rational fit.
inline double lifetime_hypergeometric(double y) {
  const double w = y / (1.0 + y);
  const double a = 1.0 / 3.0, b = -1.5, c = 4.0 / 3.0;
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 200000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w;
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return std::pow(1.0 + y, -1.0 / 3.0) * sum;
}

}  // namespace windopt::testing

#endif  // WINDOPT_TEST_SUPPORT_HPP
