#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fraks/caputo.hpp"
#include "fraks/errors.hpp"
#include "fraks/mild.hpp"
#include "fraks/specfun.hpp"

using namespace fraks;
using spectral::Field;
using spectral::Grid;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::fabs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace

TEST_CASE("propagator acts diagonally") {
  const Grid g{1, 64, 2.0 * kPi};
  const Field u = spectral::sample(g, [](double x, double) { return std::sin(3.0 * x); });
  const double t = 0.3, beta = 0.6, alpha = 1.4;
  Field want = u;
  const double f = specfun::mittag_leffler(beta, -std::pow(t, beta) * std::pow(3.0, alpha));
  for (double& v : want.values) v *= f;
  CHECK(max_diff(mild::propagator_apply(u, t, beta, alpha), want) < 1e-14);
  Field heat = u;
  for (double& v : heat.values) v *= std::exp(-t * std::pow(3.0, alpha));
  CHECK(max_diff(mild::propagator_apply(u, t, 1.0, alpha), heat) < 1e-14);
  CHECK(max_diff(mild::propagator_apply(u, 0.0, beta, alpha), u) < 1e-15);
}

TEST_CASE("propagator contracts zero-mean data") {
  const Grid g{2, 32, 5.0};
  const Field u = spectral::sample(g, [](double x, double y) { return std::cos(2.0 * x) + std::sin(x + 3.0 * y); });
  double prev = spectral::lp_norm(u, 2.0);
  for (double t : {0.01, 0.1, 1.0}) {
    const double nt = spectral::lp_norm(mild::propagator_apply(u, t, 0.5, 1.5), 2.0);
    CHECK(nt < prev);
    prev = nt;
  }
}

TEST_CASE("picard with zero forcing reproduces the propagator") {
  model::ModelParams p;
  p.a = 0.0;
  p.b = 0.0;
  p.n = 1;
  p.L = 2.0 * kPi;
  p.chemotaxis_on = false;
  const Grid g{1, 32, p.L};
  const Field u0 = spectral::sample(g, [](double x, double) { return 1.0 + 0.3 * std::cos(x) + 0.1 * std::sin(4.0 * x); });
  mild::PicardConfig cfg;
  cfg.steps = 10;
  const auto r = mild::picard_iterate(u0, p, cfg);
  REQUIRE(r.differences.size() == 2);
  CHECK(r.differences[0] > 0.0);
  CHECK(r.differences[1] == 0.0);
  CHECK(max_diff(r.trajectory.snapshots.back().field, mild::propagator_apply(u0, cfg.T, p.beta, p.alpha)) < 1e-13);
}

TEST_CASE("picard logistic matches the L1 fractional ODE") {
  model::ModelParams p;
  p.beta = 0.6;
  p.a = 1.0;
  p.b = 1.0;
  p.n = 1;
  p.L = 2.0 * kPi;
  p.chemotaxis_on = false;
  const Grid g{1, 16, p.L};
  mild::PicardConfig cfg;
  cfg.T = 0.5;
  const auto r = mild::picard_iterate(Field(g, 0.5), p, cfg);
  const auto ref = caputo::solve_fractional_ode(0.6, [](double u) { return u - u * u; }, 0.5, 1e-4, 0.5);
  double err = 0.0;
  for (std::size_t s = 0; s < r.trajectory.snapshots.size(); ++s) {
    const auto idx = static_cast<std::size_t>(std::llround(r.trajectory.snapshots[s].t / 1e-4));
    err = std::max(err, std::fabs(r.trajectory.snapshots[s].field.values[0] - ref.values[idx]));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("picard differences decay on smooth small data") {
  model::ModelParams p;
  p.n = 2;
  p.L = 2.0 * kPi;
  p.a = 0.5;
  p.b = 1.2;
  const Grid g{2, 16, p.L};
  const Field u0 = spectral::sample(g, [](double x, double y) { return 0.2 + 0.1 * std::cos(x) * std::cos(y); });
  mild::PicardConfig cfg;
  cfg.T = 0.5;
  cfg.steps = 20;
  const auto r = mild::picard_iterate(u0, p, cfg);
  REQUIRE(r.differences.size() >= 3);
  CHECK(r.differences[2] / r.differences[1] < 1.0);
  CHECK(r.duhamel_residual < 1e-9);

  cfg.max_iters = 2;
  CHECK_THROWS_AS(mild::picard_iterate(u0, p, cfg), IterationError);
}

TEST_CASE("smoothing exponents") {
  CHECK(mild::smoothing_threshold(2, 1.5, 1.0) == std::numeric_limits<double>::infinity());
  CHECK(mild::smoothing_threshold(3, 1.0, 1.0) == doctest::Approx(3.0));
  const Grid g{2, 128, 20.0};
  const Field u0 = spectral::sample(g, [](double x, double y) {
    return std::exp(-((x - 10.0) * (x - 10.0) + (y - 10.0) * (y - 10.0)) / (2.0 * 0.05 * 0.05));
  });
  std::vector<double> ts;
  for (int i = 0; i <= 10; ++i) ts.push_back(std::pow(10.0, -2.0 + 0.1 * i));
  const auto same = mild::smoothing_rate_check(u0, 0.5, 1.5, 2.0, 2.0, ts);
  CHECK(same.theoretical_exponent == doctest::Approx(-0.5));
  const auto r = mild::smoothing_rate_check(u0, 0.5, 1.5, 1.0, 2.0, ts);
  CHECK(r.theoretical_exponent == doctest::Approx(-0.833333).epsilon(1e-6));
  CHECK(std::fabs(r.fitted_exponent - r.theoretical_exponent) <= 0.1);
  CHECK_THROWS_AS(mild::smoothing_rate_check(u0, 0.5, 1.5, 1.0, 2.0, {0.1, 0.5}), DomainError);
}
