#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraks/caputo.hpp"
#include "fraks/diagnostics.hpp"
#include "fraks/errors.hpp"
#include "fraks/model.hpp"

using namespace fraks;
using namespace fraks::diagnostics;
using spectral::Field;
using spectral::Grid;

namespace {

constexpr double kPi = std::numbers::pi;

model::ModelParams params(double b, double a = 0.5) {
  model::ModelParams p;
  p.n = 2;
  p.alpha = 1.5;
  p.beta = 0.5;
  p.a = a;
  p.b = b;
  p.L = 2.0 * kPi;
  return p;
}

Field smooth(const Grid& g) {
  return spectral::sample(g, [](double x, double y) { return 1.0 + 0.3 * std::cos(x) * std::sin(y) + 0.1 * std::cos(2.0 * y); });
}

caputo::ScalarTrajectory sampled(double dt, std::size_t m, double (*f)(double)) {
  caputo::ScalarTrajectory tr;
  for (std::size_t i = 0; i <= m; ++i) {
    tr.times.push_back(dt * i);
    tr.values.push_back(f(dt * i));
  }
  return tr;
}

NormHistory synthetic(double tstar, std::size_t samples) {
  NormHistory h;
  h.h_values = {4.0, 8.0, 16.0};
  h.norms.assign(3, {});
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = tstar * j / samples;
    h.times.push_back(t);
    for (auto& c : h.norms) c.push_back(1.0 / (tstar - t));
  }
  return h;
}

}  // namespace

TEST_CASE("moser exponents") {
  const auto a = moser_exponents(params(1.2), 3);
  const std::vector<double> wa{1.0 + 4.0 / 3.0, 2.0 + 4.0 / 3.0, 4.0 + 4.0 / 3.0, 8.0 + 4.0 / 3.0};
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(a[k] == doctest::Approx(wa[k]));
  CHECK(a[3] == doctest::Approx(9.3333).epsilon(1e-4));
  const auto b = moser_exponents(params(0.5), 3);
  const std::vector<double> wb{3.0, 4.0, 6.0, 10.0};
  for (std::size_t k = 0; k < 4; ++k) CHECK(b[k] == doctest::Approx(wb[k]));
}

TEST_CASE("moser ladder on a bounded run") {
  const Grid g{2, 32, 2.0 * kPi};
  const auto p = params(1.2);
  model::SimulateOptions so;
  so.snapshot_stride = 10;
  const auto tr = model::simulate(p, smooth(g), 1e-3, 0.1, so);
  const auto lad = moser_ladder(tr, p, 3);
  for (std::size_t k = 1; k < lad.norms.size(); ++k) CHECK(lad.norms[k] >= lad.norms[k - 1]);
  CHECK(lad.norms.back() <= lad.linf_ref);
  CHECK_THROWS_AS(moser_ladder(tr, p, 6), DomainError);
}

TEST_CASE("stroock-varopoulos") {
  const Grid g{2, 32, 2.0 * kPi};
  const Field f = spectral::sample(g, [](double x, double y) { return std::exp(0.4 * std::cos(x) + 0.2 * std::sin(x + y)); });
  const auto t2 = stroock_varopoulos_terms(f, 2.0, 1.2);
  CHECK(std::fabs(check_stroock_varopoulos(f, 2.0, 1.2)) < 1e-10 * (t2.energy + 1.0));
  const auto c = stroock_varopoulos_terms(Field(g, 3.0), 3.0, 1.2);
  CHECK(std::fabs(c.dissipation) < 1e-12);
  CHECK(std::fabs(c.energy) < 1e-12);
  const auto t3 = stroock_varopoulos_terms(f, 3.0, 1.2);
  CHECK(check_stroock_varopoulos(f, 3.0, 1.2) <= 1e-8 * (t3.energy + t3.dissipation));
}

TEST_CASE("power inequality") {
  CHECK(check_power_inequality(sampled(1e-3, 200, [](double) { return 2.0; }), 2.0, 0.5) == 0.0);
  caputo::HistoryBuffer<double> h(1e-3, 0.0), h2(1e-3, 0.0);
  for (int m = 1; m <= 1000; ++m) {
    h.push(m * 1e-3);
    h2.push(m * 1e-3 * m * 1e-3);
  }
  const double margin = caputo::caputo_apply(h, 0.5) - 0.5 * caputo::caputo_apply(h2, 0.5);
  CHECK(std::fabs(margin - (1.0 / std::tgamma(1.5) - 1.0 / std::tgamma(2.5))) < 5e-3);
  CHECK(margin == doctest::Approx(0.376126).epsilon(1e-2));
  CHECK(check_power_inequality(sampled(1e-3, 1000, [](double t) { return t; }), 2.0, 0.5) >= 0.0);
  CHECK(check_power_inequality(sampled(1e-3, 1000, [](double t) { return std::exp(t); }), 3.0, 0.5) >= -1e-3);
}

TEST_CASE("blow-up monitor on synthetic norms") {
  const auto h = synthetic(1.0, 100000);
  const auto r = blowup_monitor(h, 1e3);
  CHECK(r.status == BlowupStatus::Simultaneous);
  for (const auto& d : r.detection_times) {
    REQUIRE(d.has_value());
    // Crossing lands on the first sample at or after 1 - 1e-3.
    CHECK(*d >= 1.0 - 1e-3 - 1e-12);
    CHECK(*d < 1.0 - 1e-3 + 1.5e-5);
  }
  CHECK(*r.simultaneity_spread == 0.0);
  const auto hi = blowup_monitor(h, 1e4);
  for (std::size_t i = 0; i < 3; ++i) CHECK(*hi.detection_times[i] >= *r.detection_times[i]);
  CHECK(blowup_monitor(h, 1e9).status == BlowupStatus::NoBlowup);

  auto skew = h;
  for (std::size_t j = 0; j < skew.times.size(); ++j) skew.norms[2][j] = 1.0 / (2.0 - skew.times[j]);
  const auto s = blowup_monitor(skew, 1e3);
  CHECK(s.status == BlowupStatus::NonSimultaneous);
  CHECK_FALSE(s.detection_times[2].has_value());
}

TEST_CASE("blow-up monitor on a bounded run") {
  const Grid g{2, 32, 2.0 * kPi};
  model::SimulateOptions so;
  so.q_values = {4.0, 8.0};
  const auto tr = model::simulate(params(1.2), smooth(g), 1e-3, 0.2, so);
  CHECK(blowup_monitor(tr, {4.0, 8.0}, 1e3).status == BlowupStatus::NoBlowup);
  const auto nh = norm_history(tr, {16.0});
  CHECK(nh.times.size() == tr.snapshots.size());
}

TEST_CASE("weak residual") {
  const Grid g{2, 16, 2.0 * kPi};
  const Field psi = spectral::sample(g, [](double x, double y) { return std::cos(x) + 0.5 * std::sin(x + y); });
  const TestFunction phi{psi, caputo::Polynomial{{0.0, 1.0, 0.5}}};
  {
    model::SimulateOptions so;
    so.snapshot_stride = 1;
    const auto tr = model::simulate(params(0.0, 0.0), Field(g, 0.7), 1e-2, 0.5, so);
    CHECK(weak_residual(tr, phi) < 1e-12);
  }
  std::vector<double> res;
  model::Trajectory finest;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    model::SimulateOptions so;
    so.snapshot_stride = 1;
    auto tr = model::simulate(params(1.2), smooth(g), dt, 0.2, so);
    res.push_back(weak_residual(tr, phi));
    finest = std::move(tr);
  }
  CHECK(std::log2(res[0] / res[1]) >= 1.0 - 0.2);
  CHECK(std::log2(res[1] / res[2]) >= 1.0 - 0.2);
  for (auto& s : finest.snapshots)
    for (double& v : s.field.values) v *= 1.1;
  CHECK(weak_residual(finest, phi) > 10.0 * res[2]);
}

TEST_CASE("hypercontractivity monitor") {
  const Grid g{2, 32, 2.0 * kPi};
  const auto p = params(1.2);
  model::SimulateOptions so;
  so.snapshot_stride = 10;
  const auto tr = model::simulate(p, smooth(g), 1e-3, 0.1, so);
  const double q = p.n / p.alpha;
  double sup = 0.0;
  for (const auto& s : tr.snapshots) sup = std::max(sup, std::pow(spectral::lp_norm(s.field, q), q));
  CHECK(hypercontractivity_monitor(tr, q, p) == doctest::Approx(sup).epsilon(1e-12));
  CHECK_THROWS_AS(hypercontractivity_monitor(tr, 1.0, p), DomainError);
}

TEST_CASE("report format") {
  const auto c = make_check("x", 0.5, 1.0);
  CHECK(c.pass);
  CHECK_FALSE(make_check("y", 0.5, 1.0, true).pass);
  const auto text = format_report({c});
  CHECK(text.find("x\t") == 0);
  CHECK(text.find("PASS") != std::string::npos);
}
