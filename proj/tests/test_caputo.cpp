#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fraks/caputo.hpp"
#include "fraks/specfun.hpp"

using namespace fraks::caputo;

TEST_CASE("L1 weights") {
  const auto w = l1_weights(0.5, 4);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(0.414214).epsilon(1e-6));
  const auto w16 = l1_weights(0.3, 16);
  CHECK(std::accumulate(w16.begin(), w16.end(), 0.0) == doctest::Approx(6.964405).epsilon(1e-6));
  CHECK(std::fabs(std::accumulate(w16.begin(), w16.end(), 0.0) - std::pow(16.0, 0.7)) < 1e-13);
  for (std::size_t j = 1; j < w16.size(); ++j) CHECK(w16[j] < w16[j - 1]);
  CHECK_THROWS_AS(l1_weights(1.0, 4), fraks::DomainError);
}

TEST_CASE("caputo_apply examples") {
  const double dt = 1e-3;
  {
    HistoryBuffer<double> h(dt, 0.0);
    for (int m = 1; m <= 1000; ++m) h.push(m * dt);
    // Exact D^0.5 t at t = 1 is 1/Gamma(1.5).
    CHECK(std::fabs(caputo_apply(h, 0.5) - 1.0 / std::tgamma(1.5)) < 5e-3);
    CHECK(caputo_apply(h, 0.5) == doctest::Approx(1.128379).epsilon(5e-3));
  }
  {
    HistoryBuffer<double> h(dt, 4.0);
    for (int m = 1; m <= 50; ++m) h.push(4.0);
    CHECK(std::fabs(caputo_apply(h, 0.4)) < 1e-14);
  }
  {
    HistoryBuffer<double> h(dt, 0.0);
    for (int m = 1; m <= 200; ++m) h.push(std::sin(m * dt));
    const double bd = (h[200] - h[199]) / dt;
    CHECK(std::fabs(caputo_apply(h, 0.999) - bd) < 0.01 * std::fabs(bd));
  }
  HistoryBuffer<double> tiny(dt, 1.0);
  CHECK_THROWS_AS(caputo_apply(tiny, 0.5), fraks::UsageError);
}

TEST_CASE("solve_fractional_ode") {
  const auto flat = solve_fractional_ode(0.5, [](double) { return 0.0; }, 2.0, 1e-2, 1.0);
  for (double v : flat.values) CHECK(v == 2.0);
  const auto decay = solve_fractional_ode(0.5, [](double u) { return -u; }, 1.0, 1e-3, 1.0);
  CHECK(std::fabs(decay.values.back() - 0.427584) < 1e-3);
  CHECK(std::fabs(decay.values.back() - fraks::specfun::mittag_leffler(0.5, -1.0)) < 1e-3);
  const auto classical = solve_fractional_ode(1.0, [](double u) { return -u; }, 1.0, 1e-3, 1.0);
  CHECK(std::fabs(classical.values.back() - 0.367879) < 1e-3);
  OdeOptions opt;
  opt.linear = -1.0;
  const auto split = solve_fractional_ode(0.5, [](double u) { return -u; }, 1.0, 1e-3, 1.0, opt);
  CHECK(std::fabs(split.values.back() - decay.values.back()) < 1e-12);
}

TEST_CASE("gronwall_bound") {
  CHECK(gronwall_bound(2.0, 0.7, 0.0, 1.0, 1.3) == doctest::Approx(2.0 * std::exp(0.91)).epsilon(1e-12));
  CHECK(gronwall_bound(1.0, 1.0, 0.0, 0.5, 1.0) == doctest::Approx(5.008980).epsilon(2e-6));
  CHECK(std::fabs(gronwall_bound(1.0, 1.0, 0.0, 0.5, 1.0) - std::exp(1.0) * (1.0 + std::erf(1.0))) < 1e-10);
  CHECK(gronwall_bound(3.0, 1.0, 5.0, 0.5, 0.0) == 3.0);
}

TEST_CASE("polynomial Caputo derivatives by the power rule") {
  const Polynomial p{{0.0, 0.0, 1.0}};
  const double beta = 0.4, t = 0.8;
  CHECK(caputo_left_poly(p, beta, t) == doctest::Approx(2.0 / std::tgamma(3.0 - beta) * std::pow(t, 2.0 - beta)));
  const Polynomial c{{1.0}};
  CHECK(caputo_left_poly(c, beta, t) == 0.0);
  CHECK(riemann_liouville_left_poly(c, beta, t) == doctest::Approx(std::pow(t, -beta) / std::tgamma(1.0 - beta)));
  const Polynomial q{{0.0, 1.0}};
  CHECK(caputo_right_poly(q, beta, 2.0, 0.5) ==
        doctest::Approx(std::pow(1.5, 1.0 - beta) / std::tgamma(2.0 - beta)));
}
