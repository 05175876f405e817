#pragma once

// Scalar special functions for time-fractional operators: Gamma, the
// one/two-parameter Mittag-Leffler functions, E'_beta and the Riemann-Liouville
// kernel g_beta. All functions are pure and thread-safe.

namespace fraks::specfun {

// Documented evaluation range of mittag_leffler on the real axis.
inline constexpr double kZMin = -1.0e4;
inline constexpr double kZMax = 10.0;

// The evaluator switches from the power series to the large-argument expansion
// once w = |z|^(1/beta) exceeds this value; the expansion error there is of
// order exp(-w). Below it the series is summed in long double for w <= 8 and in
// binary128 otherwise, except on the negative axis with beta < 1, where a
// real-line integral is used for 8 < w <= 40.
inline constexpr double kSeriesSwitch = 40.0;

// Inputs closer than this to a non-positive integer are rejected by gamma_function.
inline constexpr double kPoleGuard = 1.0e-8;

struct MlfParams {
  double beta = 1.0;
  double gamma = 1.0;
};

// Lanczos approximation (g = 7, 9 terms) with reflection for x < 1/2.
double gamma_function(double x);

// 1/Gamma(x), exactly zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

// E_{beta,gamma}(z) for real z in [kZMin, kZMax]; relative error <= 1e-10.
// beta in (0, 2], gamma > 0. For beta > 1 only the series region
// |z|^(1/beta) <= kSeriesSwitch is supported. Throws DomainError outside the
// supported range or when the result overflows double.
double mittag_leffler(MlfParams p, double z);

// One-parameter E_beta(z) = E_{beta,1}(z).
double mittag_leffler(double beta, double z);

// E'_beta(z) through beta * E'_beta(z) = E_{beta,beta}(z); beta in (0, 1].
double ml_derivative(double beta, double z);

// g_beta(t) = t^(beta-1) / Gamma(beta) for t > 0.
double g_kernel(double beta, double t);

namespace detail {
// Exposed for the overlap-agreement tests.
double ml_series(double beta, double gamma, double z);
double ml_asymptotic_negative(double beta, double gamma, double x);  // E(-x), x > 0
double ml_asymptotic_positive(double beta, double gamma, double z);  // E(z), z > 0
// Real-line integral for E(-x), x > 0, beta in (0, 1).
double ml_integral_negative(double beta, double gamma, double x);
}  // namespace detail

}  // namespace fraks::specfun
