#ifndef WINDOPT_MARGINALS_HPP
#define WINDOPT_MARGINALS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace windopt {

struct WeibullMarginal {
  double scale = 1.0;  // lambda > 0
  double shape = 1.0;  // k > 0

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  double mean() const;
};

struct WeibullFit {
  WeibullMarginal marginal;
  std::size_t dropped_nonpositive = 0;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;  // |d loglik| at the optimum, both parameters
  int iterations = 0;
};

/// Maximum-likelihood Weibull fit via a safeguarded Newton solve of the
/// shape profile-likelihood equation. Non-positive samples are dropped and
/// counted; fewer than 10 positive samples or degenerate (constant) data
/// raise a fit error.
WeibullFit fit_weibull(std::span<const double> speeds);

struct VonMisesComponent {
  double weight = 1.0;
  double location = 0.0;       // mu, radians
  double concentration = 1.0;  // kappa >= 0
};

/// Finite mixture of von Mises distributions on [0, 2*pi). The CDF is
/// tabulated on a 4096-interval grid (no closed form exists) and inverted by
/// monotone bisection to 1e-10 in probability.
class VonMisesMixture {
 public:
  VonMisesMixture() = default;
  explicit VonMisesMixture(std::vector<VonMisesComponent> components);

  const std::vector<VonMisesComponent>& components() const { return components_; }

  double pdf(double theta) const;
  double log_pdf(double theta) const;
  double cdf(double theta) const;
  double quantile(double p) const;
  /// Location of the global density maximum (grid scan plus golden refine).
  double mode() const;

  static constexpr int table_intervals = 4096;

 private:
  std::vector<VonMisesComponent> components_;
  std::vector<double> cdf_table_;  // cumulative at theta_i = 2*pi*i/4096
};

struct VonMisesFitOptions {
  int n_components = 4;
  /// Fixed component locations (radians). When set, EM updates only weights
  /// and concentrations ("prescribed orientation" mode).
  std::optional<std::vector<double>> fixed_locations;
  int max_iterations = 500;
  double tolerance = 1e-9;  // stop when the log-likelihood gain drops below
};

struct VonMisesFit {
  VonMisesMixture mixture;
  double log_likelihood = 0.0;
  int iterations = 0;
};

/// EM fit of a von Mises mixture to angles (radians, wrapped mod 2*pi).
/// The log-likelihood is nondecreasing across iterations. Requires at least
/// 10 samples per component.
VonMisesFit fit_von_mises_mixture(std::span<const double> angles,
                                  const VonMisesFitOptions& options = {});

}  // namespace windopt

#endif  // WINDOPT_MARGINALS_HPP
