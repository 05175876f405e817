#include "fraks/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fraks/caputo.hpp"
#include "fraks/errors.hpp"
#include "fraks/model.hpp"
#include "fraks/specfun.hpp"
#include "fraks/spectral.hpp"

namespace fraks::verify {
namespace {

using diagnostics::Check;
using diagnostics::make_check;
using spectral::Field;
using spectral::Grid;

constexpr double kPi = std::numbers::pi;

double rel(double got, double want) { return std::fabs(got - want) / std::max(std::fabs(want), 1e-300); }

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::fabs(a.values[i] - b.values[i]));
  return m;
}

double max_abs(const Field& a) { return spectral::lp_norm(a, std::numeric_limits<double>::infinity()); }

// d/dz E_beta(z) = sum_{k>=1} k z^(k-1) / Gamma(beta k + 1), summed term by term.
double ml_derivative_series(double beta, double z) {
  long double acc = 0.0L, zk = 1.0L;
  for (int k = 1; k < 400; ++k) {
    const long double term = k * zk / std::tgamma(static_cast<long double>(beta) * k + 1.0L);
    acc += term;
    zk *= z;
    if (k > 5 && std::fabs(static_cast<double>(term)) < 1e-20 * std::fabs(static_cast<double>(acc))) break;
  }
  return static_cast<double>(acc);
}

std::vector<Check> suite_specfun() {
  const auto& tol = diagnostics::tolerances();
  double worst = 0.0;
  int points = 0;
  auto probe = [&](double beta, double gamma, double z, double want) {
    worst = std::max(worst, rel(specfun::mittag_leffler({beta, gamma}, z), want));
    ++points;
  };
  for (double z : {-5.0, -2.0, -0.5, 0.3, 1.0, 2.5, 5.0}) probe(1.0, 1.0, z, std::exp(z));
  for (double x : {0.2, 0.7, 1.0, 1.5, 2.0, 3.0}) probe(2.0, 1.0, -x * x, std::cos(x));
  for (double x : {0.5, 1.0, 2.0}) probe(2.0, 1.0, x * x, std::cosh(x));
  for (double x : {0.4, 1.3, 2.2}) probe(2.0, 2.0, -x * x, std::sin(x) / x);
  for (double z : {-4.0, -2.0, -1.0, -0.3, 0.4, 1.0, 2.0}) probe(0.5, 1.0, z, std::exp(z * z) * std::erfc(-z));
  for (double z : {-3.0, -0.7, 0.9, 2.0}) probe(1.0, 2.0, z, std::expm1(z) / z);
  for (double z : {-2.0, 1.5}) probe(1.0, 3.0, z, (std::expm1(z) - z) / (z * z));
  for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.3, 1.7})
    for (double gamma : {0.5, 1.0, 2.5}) probe(beta, gamma, 0.0, 1.0 / std::tgamma(gamma));
  std::vector<Check> out;
  out.push_back(make_check("specfun.mittag_leffler_lattice(" + std::to_string(points) + ")", worst,
                           tol.mittag_leffler_rel));
  double id = 0.0;
  for (double beta : {0.3, 0.5, 0.8, 1.0})
    for (double z : {-1.5, -0.4, 0.2, 1.0}) {
      const double series = ml_derivative_series(beta, z);
      id = std::max(id, rel(beta * series, specfun::mittag_leffler({beta, beta}, z)));
      id = std::max(id, rel(specfun::ml_derivative(beta, z), series));
    }
  out.push_back(make_check("specfun.derivative_identity", id, tol.ml_derivative_identity));
  return out;
}

std::vector<Check> suite_operators() {
  const auto& tol = diagnostics::tolerances();
  std::vector<Check> out;
  double lap = 0.0, chem = 0.0;
  const std::vector<std::pair<int, int>> modes{{1, 0}, {0, 1}, {2, 3}, {5, 1}, {7, 7}, {0, 12}, {15, 2}, {3, 20}};
  const Grid g2{2, 64, 2.0 * kPi};
  for (double alpha : {0.6, 1.5}) {
    for (auto [mx, my] : modes) {
      const double kk = std::hypot(mx, my);
      const Field u = spectral::sample(g2, [&](double x, double y) { return std::cos(mx * x + my * y); });
      Field want = u;
      for (double& v : want.values) v *= std::pow(kk, alpha);
      lap = std::max(lap, max_abs_diff(spectral::fractional_laplacian(u, alpha), want) / max_abs(want));
    }
  }
  const Grid g1{1, 128, 4.0};
  for (int m : {1, 9}) {
    const double k = 2.0 * kPi * m / 4.0;
    const Field u = spectral::sample(g1, [&](double x, double) { return std::sin(k * x); });
    Field want = u;
    for (double& v : want.values) v *= std::pow(k, 1.2);
    lap = std::max(lap, max_abs_diff(spectral::fractional_laplacian(u, 1.2), want) / max_abs(want));
  }
  out.push_back(make_check("operators.fractional_laplacian_eigen", lap, tol.operator_rel));

  for (auto [mx, my] : modes) {
    const double k2 = mx * mx + my * my;
    const Field u = spectral::sample(g2, [&](double x, double y) { return std::cos(mx * x + my * y); });
    const auto gv = spectral::solve_chemoattractant(u);
    const Field wx = spectral::sample(g2, [&](double x, double y) { return -mx * std::sin(mx * x + my * y) / k2; });
    const Field wy = spectral::sample(g2, [&](double x, double y) { return -my * std::sin(mx * x + my * y) / k2; });
    const double scale = std::max(max_abs(wx), max_abs(wy));
    chem = std::max(chem, std::max(max_abs_diff(gv[0], wx), max_abs_diff(gv[1], wy)) / scale);
  }
  out.push_back(make_check("operators.chemoattractant_eigen", chem, tol.operator_rel));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Field r(g2);
  for (double& v : r.values) v = nd(rng);
  const double l2 = spectral::lp_norm(r, 2.0);
  const auto spec = spectral::forward(r);
  const auto& wv = spectral::wavevectors(g2);
  double energy = 0.0;
  for (std::size_t i = 0; i < spec.coeffs.size(); ++i) energy += wv.weight[i] * std::norm(spec.coeffs[i]);
  energy *= g2.volume();
  out.push_back(make_check("operators.parseval", rel(energy, l2 * l2), tol.operator_rel));

  Field shifted = r;
  for (double& v : shifted.values) v += 3.25;
  const auto a = spectral::solve_chemoattractant(r);
  const auto b = spectral::solve_chemoattractant(shifted);
  const double gauge = std::max(max_abs_diff(a[0], b[0]), max_abs_diff(a[1], b[1])) /
                       std::max(max_abs(a[0]), max_abs(a[1]));
  out.push_back(make_check("operators.gauge_invariance", gauge, tol.operator_rel));
  return out;
}

// exp of a random low-mode trigonometric sum: smooth and strictly positive.
Field random_positive_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.4);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  struct Mode {
    int mx, my;
    double amp, phase;
  };
  std::vector<Mode> modes;
  for (int mx = 0; mx <= 3; ++mx)
    for (int my = -3; my <= 3; ++my)
      if (mx != 0 || my > 0) modes.push_back({mx, my, nd(rng) / (1.0 + mx * mx + my * my), ph(rng)});
  const double k = 2.0 * kPi / g.L;
  return spectral::sample(g, [&](double x, double y) {
    double s = 0.0;
    for (const auto& m : modes) s += m.amp * std::cos(k * (m.mx * x + m.my * y) + m.phase);
    return std::exp(s);
  });
}

std::vector<Check> suite_inequalities(const SuiteOptions& opt) {
  const auto& tol = diagnostics::tolerances();
  const double sign = opt.inject_sign_error ? -1.0 : 1.0;
  std::vector<Check> out;
  const Grid g{2, 64, 2.0 * kPi};
  for (double p : {2.0, 3.0, 4.0}) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Field f = random_positive_field(g, seed);
      const auto t = diagnostics::stroock_varopoulos_terms(f, p, 1.2);
      const double residual = t.energy - sign * t.dissipation;
      worst = std::max(worst, residual / (std::fabs(t.energy) + std::fabs(t.dissipation)));
    }
    out.push_back(make_check("inequalities.stroock_varopoulos(p=" + std::to_string(static_cast<int>(p)) + ")", worst,
                             tol.stroock_varopoulos));
  }

  auto sampled = [](double dt, std::size_t m, auto f) {
    caputo::ScalarTrajectory tr;
    for (std::size_t i = 0; i <= m; ++i) {
      tr.times.push_back(dt * static_cast<double>(i));
      tr.values.push_back(f(dt * static_cast<double>(i)));
    }
    return tr;
  };
  const auto constant = sampled(1e-3, 1000, [](double) { return 1.5; });
  const auto linear = sampled(1e-3, 1000, [](double t) { return t; });
  const auto expo = sampled(1e-3, 1000, [](double t) { return std::exp(t); });
  const double m1 = diagnostics::check_power_inequality(constant, 2.0, 0.5);
  const double m2 = diagnostics::check_power_inequality(linear, 2.0, 0.5);
  const double m3 = diagnostics::check_power_inequality(expo, 3.0, 0.5);
  out.push_back(make_check("inequalities.power(constant)", m1, -tol.power_inequality, true));
  out.push_back(make_check("inequalities.power(t,p=2)", m2, -tol.power_inequality, true));
  out.push_back(make_check("inequalities.power(exp,p=3)", m3, -tol.power_inequality, true));

  double dual = 0.0;
  for (auto [alpha, n] : std::vector<std::pair<double, int>>{{1.0, 2}, {1.5, 2}, {1.2, 3}, {0.5, 1}, {1.9, 2}}) {
    const double s = model::sobolev_constant(alpha, n);
    dual = std::max(dual, rel(model::sobolev_constant_ball_form(alpha, n), s));
  }
  out.push_back(make_check("inequalities.sobolev_dual_form", dual, tol.sobolev_dual));
  return out;
}

std::vector<Check> suite_regimes() {
  std::vector<Check> out;
  // S^2 = Gamma(1/2)/Gamma(3/2) (2 pi)^(-1/2) = 2/sqrt(2 pi); C_* = 2 S^-2 (r-1)/(r(r-1-rb)), r = 2.
  const double s2 = 2.0 / std::sqrt(2.0 * kPi);
  const double oracle = 2.0 / s2 * 1.0 / (2.0 * (1.0 - 2.0 * 0.25));
  const double cstar = model::critical_constant(1.0, 2, 0.25);
  out.push_back(make_check("regimes.critical_constant", std::fabs(cstar - oracle), 1e-5));
  out.push_back(make_check("regimes.critical_constant_value", std::fabs(cstar - 2.506628), 1e-5));

  const Grid g{2, 64, 10.0};
  const Field bump = spectral::sample(g, [](double x, double y) {
    return 0.5 * std::exp(-((x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0)) / 2.0);
  });
  model::ModelParams p;
  p.n = 2;
  p.L = 10.0;
  p.beta = 0.5;
  p.alpha = 1.5;
  p.a = 0.5;
  p.b = 1.2;
  const auto r1 = model::classify_regime(p, bump);
  out.push_back(make_check("regimes.strong_damping",
                           r1.kind == model::RegimeKind::StrongDamping && r1.admissible ? 0.0 : 1.0, 0.0));
  p.b = 0.5;
  const auto r2 = model::classify_regime(p, bump);
  out.push_back(make_check("regimes.intermediate",
                           r2.kind == model::RegimeKind::Intermediate && std::fabs(r2.one_minus_alpha_over_n - 0.25) < 1e-15
                               ? 0.0
                               : 1.0,
                           0.0));
  p.alpha = 1.0;
  p.b = 0.25;
  p.a = 0.0;
  Field small = bump;
  const double target = 0.1 * cstar;
  const double scale = target / spectral::lp_norm(small, 2.0);
  for (double& v : small.values) v *= scale;
  const auto r3 = model::classify_regime(p, small);
  out.push_back(make_check("regimes.small_data",
                           r3.kind == model::RegimeKind::SmallData && r3.admissible ? 0.0 : 1.0, 0.0));

  model::ModelParams q;
  q.n = 2;
  q.alpha = 1.0;
  q.b = 0.25;
  const double sigma = model::default_sigma(q.b);
  const double a1 = model::birth_rate_bound(q, 0.1, 1.0, sigma, 1.0);
  const double a2 = model::birth_rate_bound(q, 0.1, 2.0, sigma, 1.0);
  const double a4 = model::birth_rate_bound(q, 0.1, 4.0, sigma, 1.0);
  out.push_back(make_check("regimes.a_max_decreasing", std::max(a2 - a1, a4 - a2), 0.0));
  out.back().pass = a1 > a2 && a2 > a4;
  return out;
}

std::vector<Check> suite_blowup() {
  const auto& tol = diagnostics::tolerances();
  std::vector<Check> out;
  diagnostics::NormHistory syn;
  syn.h_values = {4.0, 8.0, 16.0};
  for (int j = 0; j <= 100000; ++j) syn.times.push_back(j * 1e-5);
  syn.times.pop_back();
  syn.norms.assign(3, {});
  for (auto& col : syn.norms)
    for (double t : syn.times) col.push_back(1.0 / (1.0 - t));
  const auto rep = diagnostics::blowup_monitor(syn, 1e3);
  double worst = 0.0;
  for (const auto& d : rep.detection_times) worst = std::max(worst, d ? std::fabs(*d - (1.0 - 1e-3)) : 1.0);
  out.push_back(make_check("blowup.synthetic_detection", worst, 1e-9));
  out.push_back(make_check("blowup.synthetic_spread", rep.simultaneity_spread.value_or(1.0), 1e-12));
  const auto hi = diagnostics::blowup_monitor(syn, 1e4);
  bool monotone = true;
  for (std::size_t i = 0; i < 3; ++i) monotone = monotone && *hi.detection_times[i] >= *rep.detection_times[i];
  out.push_back(make_check("blowup.threshold_monotone", monotone ? 0.0 : 1.0, 0.0));

  model::ModelParams p;
  p.beta = 0.99;
  p.alpha = 1.95;
  p.a = 0.0;
  p.b = 0.0;
  p.n = 2;
  p.L = 10.0;
  const Grid g{2, 128, p.L};
  auto gaussian = [&](double mass) {
    const double s = 0.5;
    return spectral::sample(g, [&](double x, double y) {
      const double r2 = (x - 5.0) * (x - 5.0) + (y - 5.0) * (y - 5.0);
      return mass / (2.0 * kPi * s * s) * std::exp(-r2 / (2.0 * s * s));
    });
  };
  model::SimulateOptions so;
  so.q_values = {4.0, 8.0, 16.0};
  so.check_dt_guard = false;
  const auto hot = model::simulate(p, gaussian(10.0 * kPi), 1e-3, 1.0, so);
  const auto r_hot = diagnostics::blowup_monitor(hot, {4.0, 8.0, 16.0}, 1e4, tol.simultaneity);
  const double spread = r_hot.simultaneity_spread ? *r_hot.simultaneity_spread / r_hot.elapsed : 1.0;
  out.push_back(make_check("blowup.supercritical_spread_fraction", spread, tol.simultaneity));
  const auto cold = model::simulate(p, gaussian(4.0 * kPi), 1e-3, 1.0, so);
  const auto r_cold = diagnostics::blowup_monitor(cold, {4.0, 8.0, 16.0}, 1e4, tol.simultaneity);
  out.push_back(make_check("blowup.subcritical_no_blowup",
                           r_cold.status == diagnostics::BlowupStatus::NoBlowup &&
                                   cold.status == model::RunStatus::Completed
                               ? 0.0
                               : 1.0,
                           0.0));
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"specfun", "operators", "inequalities", "regimes", "blowup"};
  return names;
}

std::vector<Check> run_suite(const std::string& name, const SuiteOptions& opt) {
  if (name == "all") {
    std::vector<Check> all;
    for (const auto& n : suite_names()) {
      auto part = run_suite(n, opt);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (name == "specfun") return suite_specfun();
  if (name == "operators") return suite_operators();
  if (name == "inequalities") return suite_inequalities(opt);
  if (name == "regimes") return suite_regimes();
  if (name == "blowup") return suite_blowup();
  throw UsageError("unknown suite '" + name + "'");
}

}  // namespace fraks::verify
