#include "fraks/caputo.hpp"

#include <cmath>
#include <string>

#include "fraks/specfun.hpp"

namespace fraks::caputo {
namespace {

void check_order(double beta, const char* what) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw DomainError(std::string(what) + ": beta must lie in (0, 1], got " + std::to_string(beta));
}

// b_j for beta in (0, 1]; at beta = 1 only b_0 survives.
std::vector<double> weights_closed(double beta, std::size_t m) {
  std::vector<double> b(m, 0.0);
  if (m == 0) return b;
  if (beta == 1.0) {
    b[0] = 1.0;
    return b;
  }
  const double e = 1.0 - beta;
  double prev = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double next = std::pow(static_cast<double>(j + 1), e);
    b[j] = next - prev;
    prev = next;
  }
  return b;
}

double l1_scale(double beta, double dt) { return std::pow(dt, -beta) * specfun::reciprocal_gamma(2.0 - beta); }

double power_rule(double j, double beta) {
  // Gamma(j+1) / Gamma(j+1-beta)
  return specfun::gamma_function(j + 1.0) * specfun::reciprocal_gamma(j + 1.0 - beta);
}

}  // namespace

std::vector<double> l1_weights(double beta, std::size_t m) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("l1_weights: beta must lie in (0, 1), got " + std::to_string(beta));
  if (m < 1) throw UsageError("l1_weights: m must be at least 1");
  return weights_closed(beta, m);
}

double caputo_apply(const HistoryBuffer<double>& h, double beta) {
  check_order(beta, "caputo_apply");
  if (h.size() < 2) throw UsageError("caputo_apply: at least two states are required");
  const std::size_t m = h.size() - 1;
  const auto b = weights_closed(beta, m);
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) acc += b[j] * (h[m - j] - h[m - j - 1]);
  return l1_scale(beta, h.dt()) * acc;
}

spectral::Field caputo_apply(const HistoryBuffer<spectral::Field>& h, double beta) {
  check_order(beta, "caputo_apply");
  if (h.size() < 2) throw UsageError("caputo_apply: at least two states are required");
  const std::size_t m = h.size() - 1;
  const auto b = weights_closed(beta, m);
  spectral::Field out(h[0].grid);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& hi = h[m - j].values;
    const auto& lo = h[m - j - 1].values;
    if (hi.size() != out.values.size() || lo.size() != out.values.size())
      throw UsageError("caputo_apply: states live on different grids");
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b[j] * (hi[i] - lo[i]);
  }
  const double s = l1_scale(beta, h.dt());
  for (double& v : out.values) v *= s;
  return out;
}

ScalarTrajectory solve_fractional_ode(double beta, const std::function<double(double)>& rhs, double u0, double dt,
                                      double T, const OdeOptions& opt) {
  check_order(beta, "solve_fractional_ode");
  if (!(dt > 0.0)) throw DomainError("solve_fractional_ode: dt must be positive");
  if (!(T >= dt)) throw DomainError("solve_fractional_ode: T must be at least dt");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  const auto b = weights_closed(beta, steps + 1);
  const double c = std::pow(dt, beta) * specfun::gamma_function(2.0 - beta);
  const double lam = opt.linear;
  const double denom = 1.0 - c * lam;
  if (!(denom > 0.0)) throw DomainError("solve_fractional_ode: implicit linear part is singular for this dt");

  ScalarTrajectory tr;
  tr.times.reserve(steps + 1);
  tr.values.reserve(steps + 1);
  tr.times.push_back(0.0);
  tr.values.push_back(u0);
  std::vector<double> diffs;  // d^j = u^j - u^(j-1), j >= 1
  diffs.reserve(steps);
  for (std::size_t m = 1; m <= steps; ++m) {
    double hist = tr.values.back();
    for (std::size_t j = 1; j < m; ++j) hist -= b[j] * diffs[m - j - 1];
    double u = tr.values.back();
    bool converged = false;
    for (int it = 0; it < opt.max_iters; ++it) {
      const double g = rhs(u) - lam * u;
      const double target = (hist + c * g) / denom;
      const double next = (1.0 - opt.damping) * u + opt.damping * target;
      if (!std::isfinite(next)) break;
      const double delta = std::fabs(next - u);
      u = next;
      if (delta <= opt.tol * std::fmax(1.0, std::fabs(u))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw IntegrationError("solve_fractional_ode: fixed-point iteration did not converge", m);
    diffs.push_back(u - tr.values.back());
    tr.values.push_back(u);
    tr.times.push_back(static_cast<double>(m) * dt);
  }
  return tr;
}

double gronwall_bound(double z0, double c1, double c2_const, double beta, double t) {
  if (!(c1 > 0.0)) throw DomainError("gronwall_bound: c1 must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("gronwall_bound: beta must lie in (0, 1]");
  if (!(t >= 0.0)) throw DomainError("gronwall_bound: t must be non-negative");
  if (t == 0.0) return z0;
  const double tb = std::pow(t, beta);
  const double z = c1 * tb;
  double out = z0 * specfun::mittag_leffler(beta, z);
  if (c2_const != 0.0) {
    const double integral = c2_const * tb * specfun::reciprocal_gamma(1.0 + beta);
    out += specfun::gamma_function(beta) * specfun::mittag_leffler({beta, beta}, z) * integral;
  }
  return out;
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * s + c[j];
  return acc;
}

double caputo_left_poly(const Polynomial& p, double beta, double t) {
  check_order(beta, "caputo_left_poly");
  if (!(t > 0.0)) throw DomainError("caputo_left_poly: t must be positive");
  double acc = 0.0;
  for (std::size_t j = 1; j < p.c.size(); ++j) {
    const double dj = static_cast<double>(j);
    acc += p.c[j] * power_rule(dj, beta) * std::pow(t, dj - beta);
  }
  return acc;
}

double riemann_liouville_left_poly(const Polynomial& p, double beta, double t) {
  check_order(beta, "riemann_liouville_left_poly");
  if (!(t > 0.0)) throw DomainError("riemann_liouville_left_poly: t must be positive");
  double acc = 0.0;
  for (std::size_t j = 0; j < p.c.size(); ++j) {
    const double dj = static_cast<double>(j);
    acc += p.c[j] * power_rule(dj, beta) * std::pow(t, dj - beta);
  }
  return acc;
}

double caputo_right_poly(const Polynomial& q, double beta, double T, double t) {
  check_order(beta, "caputo_right_poly");
  if (!(t < T)) throw DomainError("caputo_right_poly: t must be below T");
  // The reflection s = T - t maps the right derivative onto the left one.
  return caputo_left_poly(q, beta, T - t);
}

}  // namespace fraks::caputo
