#include "windopt/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "windopt/stats.hpp"

namespace windopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace

double WeibullMarginal::pdf(double x) const {
  if (x < 0.0) return 0.0;
  const double t = x / scale;
  return shape / scale * std::pow(t, shape - 1.0) * std::exp(-std::pow(t, shape));
}

double WeibullMarginal::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-std::pow(x / scale, shape));
}

double WeibullMarginal::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0))
    throw std::invalid_argument("WeibullMarginal::quantile: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  return scale * std::pow(-std::log1p(-p), 1.0 / shape);
}

double WeibullMarginal::mean() const { return scale * std::tgamma(1.0 + 1.0 / shape); }

WeibullFit fit_weibull(std::span<const double> speeds) {
  std::vector<double> x;
  x.reserve(speeds.size());
  std::size_t dropped = 0;
  for (double v : speeds) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_weibull: non-finite sample");
    if (v > 0.0)
      x.push_back(v);
    else
      ++dropped;
  }
  if (x.size() < 10) throw std::runtime_error("fit_weibull: need at least 10 positive samples");

  const double n = static_cast<double>(x.size());
  double mean_log = 0.0;
  for (double v : x) mean_log += std::log(v);
  mean_log /= n;

  const double lo_check = *std::min_element(x.begin(), x.end());
  const double hi_check = *std::max_element(x.begin(), x.end());
  if (hi_check - lo_check < 1e-12 * hi_check)
    throw std::runtime_error("fit_weibull: degenerate (constant) data");

  // Profile-likelihood shape equation:
  //   g(k) = sum(x^k ln x)/sum(x^k) - 1/k - mean(ln x) = 0,
  // monotone increasing in k. Bisection bracket plus Newton polish.
  const auto g_and_dg = [&](double k, double& g, double& dg) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double v : x) {
      const double w = std::pow(v, k);
      const double lv = std::log(v);
      s0 += w;
      s1 += w * lv;
      s2 += w * lv * lv;
    }
    g = s1 / s0 - 1.0 / k - mean_log;
    dg = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k);
  };

  double lo = 1e-3, hi = 1.0;
  double g, dg;
  g_and_dg(hi, g, dg);
  int iter = 0;
  while (g < 0.0 && hi < 1e4) {
    lo = hi;
    hi *= 2.0;
    g_and_dg(hi, g, dg);
    ++iter;
  }
  if (g < 0.0) throw std::runtime_error("fit_weibull: shape equation has no root in range");

  double k = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    g_and_dg(k, g, dg);
    ++iter;
    if (g > 0.0)
      hi = k;
    else
      lo = k;
    double next = k - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - k) < 1e-15 * k && std::abs(g) < 1e-12) {
      k = next;
      break;
    }
    k = next;
  }

  double sk = 0.0;
  for (double v : x) sk += std::pow(v, k);
  const double lambda = std::pow(sk / n, 1.0 / k);

  WeibullFit fit;
  fit.marginal = {lambda, k};
  fit.dropped_nonpositive = dropped;
  fit.iterations = iter;

  double loglik = 0.0;
  for (double v : x) loglik += std::log(fit.marginal.pdf(v));
  fit.log_likelihood = loglik;

  // Full-likelihood gradient at the optimum; d/d lambda vanishes by the
  // profile construction, d/dk is the solved equation rescaled.
  double d_lambda = -n * k / lambda;
  double d_k = n / k + n * mean_log - n * std::log(lambda);
  for (double v : x) {
    const double t = v / lambda;
    const double tk = std::pow(t, k);
    d_lambda += k / lambda * tk;
    d_k -= tk * std::log(t);
  }
  fit.gradient_norm = std::hypot(d_lambda, d_k);
  return fit;
}

VonMisesMixture::VonMisesMixture(std::vector<VonMisesComponent> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("VonMisesMixture: need at least one component");
  double wsum = 0.0;
  for (const auto& c : components_) {
    if (c.concentration < 0.0)
      throw std::invalid_argument("VonMisesMixture: negative concentration");
    if (c.weight < 0.0) throw std::invalid_argument("VonMisesMixture: negative weight");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("VonMisesMixture: weights must sum to 1");

  // Trapezoid tabulation of the CDF over [0, 2*pi], renormalized so the
  // endpoint is exactly 1.
  cdf_table_.resize(table_intervals + 1);
  cdf_table_[0] = 0.0;
  const double h = kTwoPi / table_intervals;
  double prev = pdf(0.0);
  for (int i = 1; i <= table_intervals; ++i) {
    const double cur = pdf(h * i);
    cdf_table_[i] = cdf_table_[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  const double total = cdf_table_.back();
  for (double& v : cdf_table_) v /= total;
}

double VonMisesMixture::pdf(double theta) const {
  const double t = wrap_angle(theta);
  double p = 0.0;
  for (const auto& c : components_)
    p += c.weight *
         std::exp(c.concentration * std::cos(t - c.location) - log_bessel_i0(c.concentration)) /
         kTwoPi;
  return p;
}

double VonMisesMixture::log_pdf(double theta) const { return std::log(pdf(theta)); }

double VonMisesMixture::cdf(double theta) const {
  if (cdf_table_.empty()) throw std::logic_error("VonMisesMixture: not calibrated");
  const double t = wrap_angle(theta);
  const double pos = t / kTwoPi * table_intervals;
  const int i = std::min(static_cast<int>(pos), table_intervals - 1);
  const double w = pos - i;
  return cdf_table_[i] + w * (cdf_table_[i + 1] - cdf_table_[i]);
}

double VonMisesMixture::quantile(double p) const {
  if (cdf_table_.empty()) throw std::logic_error("VonMisesMixture: not calibrated");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("VonMisesMixture::quantile: p must lie in [0, 1]");
  // Bisection on the piecewise-linear tabulated CDF; 64 halvings leave the
  // probability residual far below the 1e-10 target.
  double lo = 0.0, hi = kTwoPi;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double VonMisesMixture::mode() const {
  double best_t = 0.0, best_p = -1.0;
  for (int i = 0; i < table_intervals; ++i) {
    const double t = kTwoPi * i / table_intervals;
    const double p = pdf(t);
    if (p > best_p) {
      best_p = p;
      best_t = t;
    }
  }
  // Golden refine around the best grid point.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_t - kTwoPi / table_intervals;
  double b = best_t + kTwoPi / table_intervals;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (pdf(c) > pdf(d))
      b = d;
    else
      a = c;
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return wrap_angle(0.5 * (a + b));
}

VonMisesFit fit_von_mises_mixture(std::span<const double> angles,
                                  const VonMisesFitOptions& options) {
  if (angles.empty()) throw std::invalid_argument("fit_von_mises_mixture: empty data");
  const int m = options.fixed_locations ? static_cast<int>(options.fixed_locations->size())
                                        : options.n_components;
  if (m < 1) throw std::invalid_argument("fit_von_mises_mixture: need at least one component");
  if (angles.size() < static_cast<std::size_t>(10 * m))
    throw std::invalid_argument("fit_von_mises_mixture: need at least 10 samples per component");

  std::vector<double> data(angles.begin(), angles.end());
  for (double& a : data) a = wrap_angle(a);
  const std::size_t n = data.size();

  // Deterministic initialization: locations at circular quantiles of the
  // sorted data (or the prescribed orientations), unit concentration,
  // uniform weights.
  std::vector<VonMisesComponent> comps(m);
  if (options.fixed_locations) {
    for (int j = 0; j < m; ++j) comps[j].location = wrap_angle((*options.fixed_locations)[j]);
  } else {
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < m; ++j)
      comps[j].location = sorted[static_cast<std::size_t>((j + 0.5) / m * n)];
  }
  for (auto& c : comps) {
    c.weight = 1.0 / m;
    c.concentration = 1.0;
  }

  std::vector<double> resp(n * m);
  double loglik = -std::numeric_limits<double>::infinity();
  int iter = 0;

  for (; iter < options.max_iterations; ++iter) {
    // E step.
    double new_loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double norm = 0.0;
      for (int j = 0; j < m; ++j) {
        const auto& c = comps[j];
        const double p = c.weight *
                         std::exp(c.concentration * std::cos(data[i] - c.location) -
                                  log_bessel_i0(c.concentration)) /
                         kTwoPi;
        resp[i * m + j] = p;
        norm += p;
      }
      new_loglik += std::log(norm);
      for (int j = 0; j < m; ++j) resp[i * m + j] /= norm;
    }

    const double gain = new_loglik - loglik;
    loglik = new_loglik;
    if (iter > 0 && gain < options.tolerance) break;

    // M step.
    for (int j = 0; j < m; ++j) {
      double w = 0.0, sc = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = resp[i * m + j];
        w += r;
        sc += r * std::cos(data[i]);
        ss += r * std::sin(data[i]);
      }
      comps[j].weight = w / static_cast<double>(n);
      double rbar;
      if (options.fixed_locations) {
        double aligned = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          aligned += resp[i * m + j] * std::cos(data[i] - comps[j].location);
        rbar = w > 0.0 ? std::max(aligned / w, 0.0) : 0.0;
      } else {
        if (w > 0.0) comps[j].location = wrap_angle(std::atan2(ss, sc));
        rbar = w > 0.0 ? std::hypot(sc, ss) / w : 0.0;
      }
      comps[j].concentration = von_mises_concentration(std::min(rbar, 1.0 - 1e-12));
    }

    // Guard against weight collapse.
    double wsum = 0.0;
    for (auto& c : comps) {
      c.weight = std::max(c.weight, 1e-12);
      wsum += c.weight;
    }
    for (auto& c : comps) c.weight /= wsum;
  }

  VonMisesFit fit;
  fit.mixture = VonMisesMixture(std::move(comps));
  fit.log_likelihood = loglik;
  fit.iterations = iter;
  return fit;
}

}  // namespace windopt
