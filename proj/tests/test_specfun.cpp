#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fraks/errors.hpp"
#include "fraks/specfun.hpp"

using namespace fraks::specfun;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// E_{beta,gamma}(z) by plain long-double summation; adequate while |z|^(1/beta) <= 8.
double series_oracle(double beta, double gamma, double z) {
  long double s = 0.0L, zk = 1.0L;
  for (int k = 0; k < 300; ++k) {
    s += zk / std::tgamma(static_cast<long double>(beta) * k + gamma);
    zk *= z;
  }
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("mittag_leffler frozen values") {
  CHECK(mittag_leffler({1.0, 1.0}, 1.0) == doctest::Approx(2.718282).epsilon(1e-6));
  CHECK(mittag_leffler({2.0, 1.0}, -1.0) == doctest::Approx(0.540302).epsilon(1e-6));
  CHECK(mittag_leffler({0.5, 1.0}, -1.0) == doctest::Approx(0.427584).epsilon(1e-6));
  CHECK(mittag_leffler({0.7, 0.7}, 0.0) == doctest::Approx(0.770381).epsilon(5e-6));
  CHECK(rel(mittag_leffler(0.5, -1.0), std::exp(1.0) * std::erfc(1.0)) < 1e-12);
  CHECK(rel(mittag_leffler({0.7, 0.7}, 0.0), 1.0 / std::tgamma(0.7)) < 1e-13);
}

TEST_CASE("mittag_leffler against a direct series in the series region") {
  for (double beta : {0.3, 0.6, 0.9, 1.4})
    for (double gamma : {0.5, 1.0, 1.7})
      for (double z : {-3.0, -1.2, -0.1, 0.5, 2.0}) {
        if (std::pow(std::fabs(z), 1.0 / beta) > 8.0) continue;
        CAPTURE(beta);
        CAPTURE(gamma);
        CAPTURE(z);
        CHECK(rel(mittag_leffler({beta, gamma}, z), series_oracle(beta, gamma, z)) < 1e-10);
      }
}

TEST_CASE("mittag_leffler on the negative axis is a decreasing probability-like profile") {
  for (double beta : {0.2, 0.5, 0.8, 1.0}) {
    double prev = 1.0;
    for (double z = 0.0; z >= -50.0; z -= 0.5) {
      const double e = mittag_leffler(beta, z);
      CHECK(e > 0.0);
      CHECK(e <= prev * (1.0 + 1e-12));
      prev = e;
    }
  }
}

TEST_CASE("evaluation regimes agree where they overlap") {
  for (double beta : {0.4, 0.7, 0.95}) {
    const double x = std::pow(kSeriesSwitch, beta);
    const double a = detail::ml_integral_negative(beta, 1.0, x);
    const double b = detail::ml_asymptotic_negative(beta, 1.0, x);
    CAPTURE(beta);
    CHECK(rel(a, b) < 1e-9);
    const double w = std::pow(8.0, beta);
    CHECK(rel(detail::ml_series(beta, 1.0, -w), detail::ml_integral_negative(beta, 1.0, w)) < 1e-10);
  }
}

TEST_CASE("mittag_leffler rejects out-of-range input") {
  CHECK_THROWS_AS(mittag_leffler({0.5, 1.0}, 2.0 * kZMax), fraks::DomainError);
  CHECK_THROWS_AS(mittag_leffler({0.5, 1.0}, 2.0 * kZMin), fraks::DomainError);
  CHECK_THROWS_AS(mittag_leffler({0.0, 1.0}, 0.5), fraks::DomainError);
  CHECK_THROWS_AS(mittag_leffler({0.5, -1.0}, 0.5), fraks::DomainError);
}

TEST_CASE("ml_derivative") {
  CHECK(ml_derivative(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ml_derivative(0.5, 0.0) == doctest::Approx(1.128379).epsilon(1e-6));
  CHECK(rel(ml_derivative(0.5, 0.0), 2.0 / std::sqrt(std::numbers::pi)) < 1e-13);
  CHECK(std::fabs(0.5 * ml_derivative(0.5, -2.0) - series_oracle(0.5, 0.5, -2.0)) < 1e-10);
}

TEST_CASE("gamma and g_kernel") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.3, -0.5, -2.7}) CHECK(rel(gamma_function(x), std::tgamma(x)) < 1e-13);
  CHECK_THROWS_AS(gamma_function(-2.0), fraks::DomainError);
  CHECK_THROWS_AS(gamma_function(-3.0 + 1e-10), fraks::DomainError);
  CHECK(reciprocal_gamma(0.0) == 0.0);
  CHECK(reciprocal_gamma(-4.0) == 0.0);
  CHECK(g_kernel(1.0, 5.0) == doctest::Approx(1.0));
  CHECK(g_kernel(0.5, 1.0) == doctest::Approx(0.564190).epsilon(1e-6));
}

TEST_CASE("g_kernel semigroup g_1/2 * g_1/2 = g_1") {
  // s = 1 - cos(theta) maps [0, pi] onto [0, 2] and absorbs both endpoint singularities.
  const int m = 2000;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double th = (i + 0.5) * std::numbers::pi / m;
    const double s = 1.0 - std::cos(th);
    acc += g_kernel(0.5, s) * g_kernel(0.5, 2.0 - s) * std::sin(th) * std::numbers::pi / m;
  }
  CHECK(std::fabs(acc - 1.0) < 1e-6);
}
