#include "fraks/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fraks/errors.hpp"
#include "fraks/specfun.hpp"

namespace fraks::diagnostics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Field pointwise(const Field& f, double (*op)(double, double), double e) {
  Field out = f;
  for (double& v : out.values) v = op(v, e);
  return out;
}

double power_of(double v, double e) { return std::pow(std::max(v, 0.0), e); }

// L1 Caputo derivative at every grid index m >= 1 of samples y^0..y^M.
std::vector<double> l1_derivatives(const std::vector<double>& y, double beta, double dt) {
  const std::size_t M = y.size() - 1;
  std::vector<double> b(M, 0.0);
  if (beta < 1.0) {
    b = caputo::l1_weights(beta, M);
  } else {
    b[0] = 1.0;
  }
  const double s = std::pow(dt, -beta) * specfun::reciprocal_gamma(2.0 - beta);
  std::vector<double> out(M + 1, 0.0);
  for (std::size_t m = 1; m <= M; ++m) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += b[j] * (y[m - j] - y[m - j - 1]);
    out[m] = s * acc;
  }
  return out;
}

const std::vector<double>* row_column(const Trajectory& traj, double h, std::vector<double>& buffer) {
  for (std::size_t i = 0; i < traj.q_values.size(); ++i) {
    if (traj.q_values[i] != h) continue;
    buffer.clear();
    for (const auto& r : traj.rows) buffer.push_back(r.lq.at(i));
    return &buffer;
  }
  return nullptr;
}

}  // namespace

const Tolerances& tolerances() {
  static const Tolerances t{};
  return t;
}

Check make_check(std::string name, double value, double tolerance, bool at_least) {
  Check c;
  c.name = std::move(name);
  c.margin = value;
  c.tolerance = tolerance;
  c.pass = std::isfinite(value) && (at_least ? value >= tolerance : value <= tolerance);
  return c;
}

std::string format_report(const std::vector<Check>& checks) {
  std::ostringstream os;
  os << std::setprecision(6);
  for (const auto& c : checks)
    os << c.name << '\t' << c.margin << '\t' << c.tolerance << '\t' << (c.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::vector<double> moser_exponents(const ModelParams& p, int k_max) {
  if (k_max < 0) throw DomainError("moser_exponents: k_max must be non-negative");
  double base = p.n / p.alpha;
  if (p.b < 1.0) base = std::max(base, 1.0 / (1.0 - p.b));
  std::vector<double> q;
  for (int k = 0; k <= k_max; ++k) q.push_back(std::ldexp(1.0, k) + base);
  return q;
}

LadderReport moser_ladder(const Trajectory& traj, const ModelParams& p, int k_max) {
  LadderReport r;
  r.q_values = moser_exponents(p, k_max);
  if (r.q_values.back() > 64.0) throw DomainError("moser_ladder: q_(k_max) exceeds 64");
  if (traj.snapshots.empty()) throw UsageError("moser_ladder: trajectory has no snapshots");
  r.norms.assign(r.q_values.size(), 0.0);
  for (const auto& s : traj.snapshots) {
    r.linf_ref = std::max(r.linf_ref, spectral::lp_norm(s.field, kInf));
    for (std::size_t k = 0; k < r.q_values.size(); ++k)
      r.norms[k] = std::max(r.norms[k], spectral::lp_norm_normalized(s.field, r.q_values[k]));
  }
  return r;
}

StroockVaropoulosTerms stroock_varopoulos_terms(const Field& f, double p, double alpha) {
  if (!(p > 1.0)) throw DomainError("stroock_varopoulos: p must exceed 1");
  if (spectral::min_value(f) < 0.0) throw DomainError("stroock_varopoulos: f must be non-negative");
  StroockVaropoulosTerms t;
  t.dissipation = spectral::inner(pointwise(f, power_of, p - 1.0), spectral::fractional_laplacian(f, alpha));
  const double s = spectral::sobolev_seminorm(pointwise(f, power_of, 0.5 * p), 0.5 * alpha);
  t.energy = 4.0 * (p - 1.0) / (p * p) * s * s;
  return t;
}

double check_stroock_varopoulos(const Field& f, double p, double alpha) {
  const auto t = stroock_varopoulos_terms(f, p, alpha);
  return t.energy - t.dissipation;
}

double check_power_inequality(const caputo::ScalarTrajectory& tau, double p, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("check_power_inequality: beta must lie in (0, 1]");
  if (!(p >= 1.0)) throw DomainError("check_power_inequality: p must be at least 1");
  if (tau.values.size() < 2 || tau.times.size() != tau.values.size())
    throw UsageError("check_power_inequality: need at least two samples");
  for (double v : tau.values)
    if (!(v >= 0.0)) throw DomainError("check_power_inequality: tau must be non-negative");
  const double dt = tau.times[1] - tau.times[0];
  std::vector<double> taup(tau.values.size());
  for (std::size_t i = 0; i < taup.size(); ++i) taup[i] = std::pow(tau.values[i], p);
  const auto d1 = l1_derivatives(tau.values, beta, dt);
  const auto dp = l1_derivatives(taup, beta, dt);
  double margin = kInf;
  for (std::size_t m = 1; m < tau.values.size(); ++m)
    margin = std::min(margin, std::pow(tau.values[m], p - 1.0) * d1[m] - dp[m] / p);
  return margin;
}

std::string to_string(BlowupStatus s) {
  switch (s) {
    case BlowupStatus::NoBlowup:
      return "NoBlowup";
    case BlowupStatus::Simultaneous:
      return "Simultaneous";
    case BlowupStatus::NonSimultaneous:
      return "NonSimultaneous";
  }
  return "unknown";
}

NormHistory norm_history(const Trajectory& traj, const std::vector<double>& h_values) {
  NormHistory nh;
  nh.h_values = h_values;
  std::vector<double> buffer;
  bool from_rows = !traj.rows.empty();
  for (double h : h_values) from_rows = from_rows && row_column(traj, h, buffer) != nullptr;
  if (from_rows) {
    for (const auto& r : traj.rows) nh.times.push_back(r.t);
    for (double h : h_values) nh.norms.push_back(*row_column(traj, h, buffer));
    return nh;
  }
  for (const auto& s : traj.snapshots) nh.times.push_back(s.t);
  for (double h : h_values) {
    std::vector<double> col;
    for (const auto& s : traj.snapshots) col.push_back(spectral::lp_norm(s.field, h));
    nh.norms.push_back(std::move(col));
  }
  return nh;
}

BlowupReport blowup_monitor(const NormHistory& history, double threshold, double spread_tol) {
  if (history.times.empty()) throw UsageError("blowup_monitor: empty history");
  if (history.norms.size() != history.h_values.size()) throw UsageError("blowup_monitor: one series per h required");
  BlowupReport r;
  r.h_values = history.h_values;
  r.elapsed = history.times.back() - history.times.front();
  std::size_t detected = 0;
  for (const auto& col : history.norms) {
    if (col.size() != history.times.size()) throw UsageError("blowup_monitor: series length mismatch");
    std::optional<double> hit;
    for (std::size_t j = 0; j < col.size(); ++j)
      if (!(col[j] < threshold)) {
        hit = history.times[j];
        break;
      }
    detected += hit.has_value();
    r.detection_times.push_back(hit);
  }
  if (detected == 0) {
    r.status = BlowupStatus::NoBlowup;
  } else if (detected < r.detection_times.size()) {
    r.status = BlowupStatus::NonSimultaneous;
  } else {
    double lo = kInf, hi = -kInf;
    for (const auto& d : r.detection_times) {
      lo = std::min(lo, *d);
      hi = std::max(hi, *d);
    }
    r.simultaneity_spread = hi - lo;
    r.status = hi - lo <= spread_tol * r.elapsed ? BlowupStatus::Simultaneous : BlowupStatus::NonSimultaneous;
  }
  return r;
}

BlowupReport blowup_monitor(const Trajectory& traj, const std::vector<double>& h_values, double threshold,
                            double spread_tol) {
  return blowup_monitor(norm_history(traj, h_values), threshold, spread_tol);
}

double weak_residual(const Trajectory& traj, const TestFunction& phi) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2) throw UsageError("weak_residual: at least two snapshots are required");
  if (phi.chi.c.empty() || phi.chi.c.size() > 5) throw DomainError("weak_residual: chi must have degree <= 4");
  if (phi.chi.c[0] != 0.0) throw DomainError("weak_residual: chi must vanish at T");
  const auto& p = traj.params;
  const Field& u0 = snaps.front().field;
  if (!(phi.psi.grid == u0.grid)) throw UsageError("weak_residual: psi lives on a different grid");
  const double T = snaps.back().t;
  const Field Apsi = spectral::fractional_laplacian(phi.psi, p.alpha);
  // grad psi, recovered from -Delta psi by the chemoattractant solve.
  const auto grad_psi = spectral::solve_chemoattractant(spectral::fractional_laplacian(phi.psi, 2.0));
  std::vector<double> g(snaps.size(), 0.0);
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const double t = snaps[i].t;
    const Field& u = snaps[i].field;
    double lhs = 0.0;
    if (t < T) {
      Field du = u;
      for (std::size_t k = 0; k < du.values.size(); ++k) du.values[k] -= u0.values[k];
      lhs = spectral::inner(du, phi.psi) * caputo::caputo_right_poly(phi.chi, p.beta, T, t);
    }
    double rhs = -spectral::inner(u, Apsi) + p.a * spectral::inner(u, phi.psi);
    if (p.b != 0.0) rhs -= p.b * spectral::inner(spectral::dealiased_product(u, u), phi.psi);
    if (p.chemotaxis_on) {
      const Field drive = p.eps_mollify ? spectral::mollify(u, *p.eps_mollify) : u;
      const auto gv = spectral::solve_chemoattractant(drive);
      for (int axis = 0; axis < u.grid.n; ++axis)
        rhs += spectral::inner(spectral::dealiased_product(u, gv[axis]), grad_psi[axis]);
    }
    g[i] = lhs - phi.chi(T - t) * rhs;
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < snaps.size(); ++i) acc += 0.5 * (snaps[i].t - snaps[i - 1].t) * (g[i] + g[i - 1]);
  return std::fabs(acc);
}

double hypercontractivity_monitor(const Trajectory& traj, double q, const ModelParams& p) {
  const double q0 = p.n / p.alpha;
  if (!(q >= q0)) throw DomainError("hypercontractivity_monitor: q must be at least n/alpha");
  const auto nh = norm_history(traj, {q});
  double sup = 0.0;
  for (std::size_t j = 0; j < nh.times.size(); ++j) {
    const double t = nh.times[j];
    const double w = q == q0 ? 1.0 : std::pow(t, q - q0);
    sup = std::max(sup, w * std::pow(nh.norms[0][j], q));
  }
  return sup;
}

double mass_identity_residual(const Trajectory& traj) {
  const auto& rows = traj.rows;
  if (rows.size() < 2) throw UsageError("mass_identity_residual: at least two rows are required");
  const auto& p = traj.params;
  const double dt = traj.dt;
  for (std::size_t m = 1; m < rows.size(); ++m)
    if (std::fabs(rows[m].t - rows[m - 1].t - dt) > 1e-9 * std::max(1.0, rows[m].t))
      throw UsageError("mass_identity_residual: rows must be one per step");
  const std::size_t M = rows.size() - 1;
  std::vector<double> b(M, 0.0);
  if (p.beta < 1.0) {
    b = caputo::l1_weights(p.beta, M);
  } else {
    b[0] = 1.0;
  }
  const double c = std::pow(dt, p.beta) * specfun::gamma_function(2.0 - p.beta);
  double scale = 1.0, worst = 0.0;
  for (const auto& r : rows) scale = std::max(scale, std::fabs(r.mass));
  for (std::size_t m = 1; m <= M; ++m) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < m; ++j) lhs += b[j] * (rows[m - j].mass - rows[m - j - 1].mass);
    const double src = c * (p.a * rows[m - 1].mass - p.b * rows[m - 1].l2 * rows[m - 1].l2);
    worst = std::max(worst, std::fabs(lhs - src));
  }
  return worst / scale;
}

}  // namespace fraks::diagnostics
