#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "windopt/risk.hpp"
#include "windopt/rng.hpp"

using namespace windopt;

namespace {

std::vector<double> one_to_ten() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

TimeSeries constant_series(double c, int n = 11) {
  return {0.0, 0.1, std::vector<double>(n, c)};
}

}  // namespace

TEST_CASE("time_average basics") {
  CHECK(time_average(constant_series(3.5)) == doctest::Approx(3.5).epsilon(1e-15));

  TimeSeries ramp{0.0, 0.01, {}};
  for (int i = 0; i <= 100; ++i) ramp.values.push_back(i / 100.0);
  CHECK(time_average(ramp) == doctest::Approx(0.5).epsilon(1e-14));

  // Five full periods of sin: the trapezoid sum cancels exactly.
  TimeSeries wave{0.0, 5.0 / 1000.0, {}};
  for (int i = 0; i <= 1000; ++i)
    wave.values.push_back(std::sin(2.0 * std::numbers::pi * i * 5.0 / 1000.0));
  CHECK(std::abs(time_average(wave)) < 1e-10);

  CHECK_THROWS_AS(time_average(TimeSeries{0.0, 1.0, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(time_average(TimeSeries{0.0, -1.0, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("ensemble mean and variance") {
  const std::vector<double> two{2.0, 4.0};
  CHECK(ensemble_mean(two) == 3.0);
  CHECK(ensemble_mean(std::vector<double>{7.25}) == 7.25);
  CHECK_THROWS_AS(ensemble_mean(std::vector<double>{}), std::invalid_argument);

  Rng rng(42);
  std::vector<double> normals(10000);
  for (double& v : normals) v = rng.normal();
  CHECK(std::abs(ensemble_mean(normals)) < 0.05);

  CHECK(variance(std::vector<double>{5.0, 5.0, 5.0}) == 0.0);
  CHECK(variance(std::vector<double>{1.0, 3.0}) == 2.0);
  CHECK_THROWS_AS(variance(std::vector<double>{1.0}), std::invalid_argument);

  // Affine scaling law on random data.
  std::vector<double> scaled(normals.begin(), normals.begin() + 100);
  const double base = variance(scaled);
  for (double& v : scaled) v = -2.5 * v + 7.0;
  CHECK(variance(scaled) == doctest::Approx(6.25 * base).epsilon(1e-12));
}

TEST_CASE("estimator variance") {
  const std::vector<double> pair{1.0, 3.0};
  CHECK(estimator_variance(pair) == 1.0);
  CHECK(estimator_variance(std::vector<double>{4.0, 4.0, 4.0}) == 0.0);

  // {1,3,1,3}: unbiased variance 4/3 over N = 4.
  CHECK(estimator_variance(std::vector<double>{1.0, 3.0, 1.0, 3.0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // Duplication halves the estimate once the unbiased divisor stops
  // mattering: 1/N scaling at fixed sample variance.
  Rng rng(7);
  std::vector<double> big(2000);
  for (double& v : big) v = rng.normal();
  std::vector<double> big2 = big;
  big2.insert(big2.end(), big.begin(), big.end());
  CHECK(estimator_variance(big2) ==
        doctest::Approx(0.5 * estimator_variance(big)).epsilon(1e-3));
}

TEST_CASE("value at risk on the 1..10 ladder") {
  const auto v = one_to_ten();
  CHECK(value_at_risk(v, 0.9) == 9.0);
  CHECK(value_at_risk(v, 0.5) == 5.0);
  CHECK(value_at_risk(std::vector<double>{6.5, 6.5, 6.5}, 0.3) == 6.5);
  CHECK_THROWS_AS(value_at_risk(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(value_at_risk(v, 1.0), std::invalid_argument);
}

TEST_CASE("cvar on the 1..10 ladder") {
  const auto v = one_to_ten();
  const auto c90 = cvar(v, 0.9);
  CHECK(c90.cvar == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(c90.s_star == 9.0);
  const auto c50 = cvar(v, 0.5);
  CHECK(c50.cvar == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(c50.s_star == 5.0);
}

TEST_CASE("cvar limit beta -> 0 recovers the mean") {
  Rng rng(3);
  std::vector<double> x(10000);
  for (double& v : x) v = rng.normal() * 2.0 + 1.0;
  const double mean = ensemble_mean(x);
  const double sd = std_dev(x);
  CHECK(std::abs(cvar(x, 1e-6).cvar - mean) < 1e-4 * sd);
}

TEST_CASE("cvar coherence properties") {
  Rng rng(11);
  std::vector<double> x(257);
  for (double& v : x) v = rng.normal() * 3.0;

  for (double beta : {0.2, 0.5, 0.9}) {
    const double base = cvar(x, beta).cvar;

    std::vector<double> shifted = x;
    for (double& v : shifted) v += 4.25;
    CHECK(cvar(shifted, beta).cvar == doctest::Approx(base + 4.25).epsilon(1e-12));

    std::vector<double> scaled = x;
    for (double& v : scaled) v *= 2.5;
    CHECK(cvar(scaled, beta).cvar == doctest::Approx(2.5 * base).epsilon(1e-12));

    std::vector<double> dominated = x;
    for (double& v : dominated) v -= std::abs(rng.normal());
    CHECK(cvar(dominated, beta).cvar <= base + 1e-12);

    CHECK(cvar(x, beta).cvar >= value_at_risk(x, beta) - 1e-12);
    CHECK(cvar(x, beta).cvar >= ensemble_mean(x) - 1e-12);
  }

  // Monotone in beta, and above the median for beta >= 0.5.
  double prev = cvar(x, 0.05).cvar;
  for (double beta = 0.1; beta < 0.96; beta += 0.05) {
    const double cur = cvar(x, beta).cvar;
    CHECK(cur >= prev - 1e-12);
    if (beta >= 0.5) CHECK(value_at_risk(x, beta) >= value_at_risk(x, 0.5) - 1e-12);
    prev = cur;
  }
}

TEST_CASE("RU form equals sorted tail average at integral beta*N") {
  Rng rng(19);
  for (int n = 1; n <= 20; ++n) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal() * 5.0 + rng.uniform();
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    for (int b = 1; b <= 9; ++b) {
      const double beta = b / 10.0;
      const double bn = beta * n;
      if (std::abs(bn - std::round(bn)) > 1e-9) continue;
      const int tail = n - static_cast<int>(std::round(bn));
      if (tail == 0) continue;
      double tail_mean = 0.0;
      for (int i = n - tail; i < n; ++i) tail_mean += sorted[i];
      tail_mean /= tail;
      CHECK(cvar(x, beta).cvar == doctest::Approx(tail_mean).epsilon(1e-12));
    }
  }
}

TEST_CASE("cvar_tail_series hinge behavior") {
  TimeSeries two{0.0, 1.0, {1.0, 3.0}};
  CHECK(cvar_tail_series(two, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cvar_tail_series(two, 10.0) == 0.0);
  const double far = -1e9;
  CHECK(cvar_tail_series(two, far) ==
        doctest::Approx(time_average(two) - far).epsilon(1e-12));
}

TEST_CASE("composite ensemble-time estimator") {
  std::vector<TimeSeries> set{constant_series(2.0), constant_series(4.0)};
  CHECK(ensemble_time_average(set) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ensemble_time_average(std::span<const TimeSeries>{}),
                  std::invalid_argument);
}
