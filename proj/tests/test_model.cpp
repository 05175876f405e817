#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fraks/caputo.hpp"
#include "fraks/diagnostics.hpp"
#include "fraks/errors.hpp"
#include "fraks/model.hpp"

using namespace fraks;
using namespace fraks::model;
using spectral::Field;
using spectral::Grid;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams params(int n, double alpha, double b, double a = 0.0, double L = 2.0 * kPi) {
  ModelParams p;
  p.n = n;
  p.alpha = alpha;
  p.b = b;
  p.a = a;
  p.L = L;
  return p;
}

Field gaussian(const Grid& g, double amp, double sigma) {
  const double c = g.L / 2.0;
  return spectral::sample(g, [&](double x, double y) {
    const double r2 = (x - c) * (x - c) + (g.n == 2 ? (y - c) * (y - c) : 0.0);
    return amp * std::exp(-r2 / (2.0 * sigma * sigma));
  });
}

}  // namespace

TEST_CASE("sobolev constant") {
  const double s = sobolev_constant(1.0, 2);
  CHECK(s * s == doctest::Approx(0.797885).epsilon(1e-6));
  CHECK(s == doctest::Approx(0.893244).epsilon(1e-6));
  CHECK(std::fabs(s * s - 2.0 / std::sqrt(2.0 * kPi)) < 1e-14);
  CHECK(std::fabs(sobolev_constant(1.2, 3) - sobolev_constant_ball_form(1.2, 3)) < 1e-10);
  CHECK_THROWS_AS(sobolev_constant(2.0, 2), DomainError);
}

TEST_CASE("critical constant and birth-rate bound") {
  CHECK(critical_constant(1.0, 2, 0.25) == doctest::Approx(2.506628).epsilon(1e-6));
  CHECK_THROWS_AS(critical_constant(1.0, 2, 0.5), DomainError);
  CHECK(critical_constant(1.0, 2, 0.1) < critical_constant(1.0, 2, 0.3));
  CHECK(tau5(1.0, 2, 0.2) == doctest::Approx(0.357143).epsilon(1e-6));
  const auto p = params(2, 1.0, 0.25);
  const double amax = birth_rate_bound(p, 0.0, 1.0, 0.2, 1.0);
  CHECK(amax == doctest::Approx(1.175).epsilon(1e-3));
  CHECK(std::fabs(amax - std::pow(std::pow(critical_constant(1.0, 2, 0.25) / 2.0, 2.0), 1.0 / 2.8)) < 1e-12);
  double prev = amax;
  for (double T : {2.0, 4.0, 8.0, 100.0}) {
    const double v = birth_rate_bound(p, 0.0, T, 0.2, 1.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(default_sigma(0.25) == doctest::Approx(1.0 / 6.0));
  CHECK(default_sigma(0.9) == 0.5);
}

TEST_CASE("classify_regime examples") {
  const Grid g{2, 64, 10.0};
  const Field u0 = gaussian(g, 0.5, 1.0);
  const auto strong = classify_regime(params(2, 1.5, 1.2, 0.0, 10.0), u0);
  CHECK(strong.kind == RegimeKind::StrongDamping);
  CHECK(strong.admissible);
  const auto mid = classify_regime(params(2, 1.5, 0.5, 0.0, 10.0), u0);
  CHECK(mid.kind == RegimeKind::Intermediate);
  CHECK(mid.one_minus_alpha_over_n == doctest::Approx(0.25));

  const auto p = params(2, 1.0, 0.25, 0.0, 10.0);
  Field small = u0;
  const double k = 0.1 * critical_constant(1.0, 2, 0.25) / spectral::lp_norm(u0, 2.0);
  for (double& v : small.values) v *= k;
  const auto sd = classify_regime(p, small);
  CHECK(sd.kind == RegimeKind::SmallData);
  CHECK(sd.admissible);
  CHECK(sd.c_star.has_value());
  CHECK(sd.a_max.has_value());
  Field big = small;
  for (double& v : big.values) v *= 10.0;
  CHECK_FALSE(classify_regime(p, big).admissible);
}

TEST_CASE("classification is stable under grid refinement") {
  const auto p = params(2, 1.0, 0.25, 0.0, 10.0);
  const auto coarse = classify_regime(p, gaussian(Grid{2, 64, 10.0}, 0.1, 1.0));
  const auto fine = classify_regime(p, gaussian(Grid{2, 128, 10.0}, 0.1, 1.0));
  CHECK(coarse.kind == fine.kind);
  CHECK(coarse.admissible == fine.admissible);
  CHECK(std::fabs(coarse.norm_n_over_alpha - fine.norm_n_over_alpha) < 1e-10);
}

TEST_CASE("rhs structure") {
  const Grid g{2, 32, 2.0 * kPi};
  auto p = params(2, 1.5, 0.7, 1.3);
  const Field c = rhs(Field(g, 2.0), p);
  for (double v : c.values) CHECK(v == doctest::Approx(1.3 * 2.0 - 0.7 * 4.0).epsilon(1e-13));

  const Field u = spectral::sample(g, [](double x, double y) { return 1.0 + 0.4 * std::sin(x) * std::cos(2.0 * y); });
  const Field r = rhs(u, p);
  Field sq = u;
  for (double& v : sq.values) v *= v;
  CHECK(std::fabs(spectral::integral(r) - (1.3 * spectral::integral(u) - 0.7 * spectral::integral(sq))) < 1e-10);

  p.a = p.b = 0.0;
  p.chemotaxis_on = false;
  const Field d = rhs(u, p);
  const Field fl = spectral::fractional_laplacian(u, 1.5);
  for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(d.values[i] == doctest::Approx(-fl.values[i]).epsilon(1e-12));
}

TEST_CASE("pure fractional diffusion conserves mass and dissipates L2") {
  const Grid g{1, 64, 2.0 * kPi};
  auto p = params(1, 1.5, 0.0);
  p.chemotaxis_on = false;
  const Field u0 = spectral::sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(x); });
  const auto tr = simulate(p, u0, 1e-3, 1.0);
  REQUIRE(tr.rows.size() == 1001);
  double prev = tr.rows.front().l2;
  for (const auto& r : tr.rows) {
    CHECK(std::fabs(r.mass - tr.rows.front().mass) < 1e-10);
    CHECK(r.l2 <= prev + 1e-14);
    prev = r.l2;
  }
}

TEST_CASE("homogeneous logistic approaches a/b") {
  const Grid g{1, 16, 2.0 * kPi};
  auto p = params(1, 1.5, 1.0, 1.0);
  p.beta = 0.6;
  const auto tr = simulate(p, Field(g, 0.5), 1e-3, 1.0);
  const auto ref = caputo::solve_fractional_ode(0.6, [](double u) { return u - u * u; }, 0.5, 1e-4, 1.0);
  CHECK(std::fabs(tr.snapshots.back().field.values[0] - ref.values.back()) < 1e-3);
  const auto longer = simulate(p, Field(g, 0.5), 1e-2, 40.0);
  CHECK(std::fabs(longer.snapshots.back().field.values[0] - 1.0) < 0.05);
}

TEST_CASE("discrete mass balance") {
  const Grid g{2, 32, 2.0 * kPi};
  const auto p = params(2, 1.5, 1.2, 0.5);
  const auto tr = simulate(p, gaussian(g, 1.0, 0.8), 1e-3, 0.2);
  CHECK(diagnostics::mass_identity_residual(tr) <= 1e-8);
}

TEST_CASE("guards and blow-up ceiling") {
  const Grid g{2, 32, 2.0 * kPi};
  const auto p = params(2, 1.5, 1.2, 0.5);
  const Field u0 = gaussian(g, 50.0, 0.5);
  CHECK(dt_guard_value(p, u0, 0.5) > 1.0);
  CHECK_THROWS_AS(simulate(p, u0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(simulate(p, gaussian(Grid{2, 32, 5.0}, 1.0, 0.5), 1e-3, 0.1), UsageError);

  auto q = params(2, 1.95, 0.0, 0.0, 10.0);
  q.beta = 0.99;
  SimulateOptions so;
  so.blowup_factor = 20.0;
  so.check_dt_guard = false;
  const Grid gb{2, 64, 10.0};
  const auto tr = simulate(q, gaussian(gb, 10.0 * kPi / (2.0 * kPi * 0.25), 0.5), 1e-3, 1.0, so);
  CHECK(tr.status == RunStatus::BlowupSuspected);
  CHECK_FALSE(tr.message.empty());
  CHECK(tr.times.back() < 1.0);
}
