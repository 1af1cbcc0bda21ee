#include "windopt/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windopt {

EmpiricalCopula::EmpiricalCopula(std::vector<std::array<double, 2>> points)
    : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("EmpiricalCopula: need n >= 2 pairs");
  for (const auto& p : points_)
    if (!(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0))
      throw std::invalid_argument("EmpiricalCopula: pair outside the unit square");
}

double EmpiricalCopula::cdf(double u, double v) const {
  if (points_.empty()) throw std::logic_error("EmpiricalCopula: not calibrated");
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw std::invalid_argument("EmpiricalCopula::cdf: arguments must lie in [0, 1]");
  std::size_t hits = 0;
  for (const auto& p : points_)
    if (p[0] <= u && p[1] <= v) ++hits;
  return static_cast<double>(hits) / static_cast<double>(points_.size());
}

EmpiricalCopula pseudo_observations(std::span<const double> thetas_rad,
                                    std::span<const double> speeds,
                                    const VonMisesMixture& theta_marginal,
                                    const WeibullMarginal& speed_marginal) {
  if (thetas_rad.size() != speeds.size())
    throw std::invalid_argument("pseudo_observations: size mismatch");
  std::vector<std::array<double, 2>> pts;
  pts.reserve(thetas_rad.size());
  for (std::size_t i = 0; i < thetas_rad.size(); ++i)
    pts.push_back({theta_marginal.cdf(thetas_rad[i]), speed_marginal.cdf(speeds[i])});
  return EmpiricalCopula(std::move(pts));
}

std::pair<double, double> sample_joint(const EmpiricalCopula& copula,
                                       const VonMisesMixture& theta_marginal,
                                       const WeibullMarginal& speed_marginal, Rng& rng,
                                       bool jitter) {
  const auto& pts = copula.points();
  if (pts.empty()) throw std::logic_error("sample_joint: empty copula");
  const std::size_t n = pts.size();
  const std::size_t pick = std::min<std::size_t>(
      static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)), n - 1);
  double u = pts[pick][0];
  double v = pts[pick][1];
  if (jitter) {
    const double w = 1.0 / static_cast<double>(n);
    u += w * (rng.uniform() - 0.5);
    v += w * (rng.uniform() - 0.5);
  }
  // Keep quantile arguments strictly inside (0, 1); the Weibull quantile
  // diverges at 1.
  u = std::clamp(u, 1e-9, 1.0 - 1e-9);
  v = std::clamp(v, 1e-9, 1.0 - 1e-9);
  return {theta_marginal.quantile(u), speed_marginal.quantile(v)};
}

}  // namespace windopt
