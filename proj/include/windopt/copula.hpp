#ifndef WINDOPT_COPULA_HPP
#define WINDOPT_COPULA_HPP

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "windopt/marginals.hpp"
#include "windopt/rng.hpp"

namespace windopt {

/// Empirical copula over pseudo-observation pairs in the unit square.
class EmpiricalCopula {
 public:
  EmpiricalCopula() = default;
  explicit EmpiricalCopula(std::vector<std::array<double, 2>> points);

  /// C_n(u, v) = (1/n) sum 1[u_i <= u, v_i <= v].
  double cdf(double u, double v) const;

  std::size_t size() const { return points_.size(); }
  const std::vector<std::array<double, 2>>& points() const { return points_; }

 private:
  std::vector<std::array<double, 2>> points_;
};

/// Probability-integral transform of paired records through the fitted
/// marginals: (u_i, v_i) = (F_theta(theta_i), F_speed(speed_i)).
EmpiricalCopula pseudo_observations(std::span<const double> thetas_rad,
                                    std::span<const double> speeds,
                                    const VonMisesMixture& theta_marginal,
                                    const WeibullMarginal& speed_marginal);

/// Draw one dependent (theta, u_bar) pair: resample a stored pseudo-
/// observation, smooth it with uniform jitter of width 1/n per coordinate,
/// and invert the marginals.
std::pair<double, double> sample_joint(const EmpiricalCopula& copula,
                                       const VonMisesMixture& theta_marginal,
                                       const WeibullMarginal& speed_marginal, Rng& rng,
                                       bool jitter = true);

}  // namespace windopt

#endif  // WINDOPT_COPULA_HPP
