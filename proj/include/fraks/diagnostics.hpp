#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fraks/caputo.hpp"
#include "fraks/model.hpp"
#include "fraks/spectral.hpp"

namespace fraks::diagnostics {

using model::ModelParams;
using model::Trajectory;
using spectral::Field;

// Named tolerances shared by the verify suites and the acceptance runner.
struct Tolerances {
  double mittag_leffler_rel = 1e-8;
  double ml_derivative_identity = 1e-10;
  double operator_rel = 1e-12;
  double l1_order_band = 0.2;
  double stroock_varopoulos = 1e-8;  // relative to the size of both terms
  double power_inequality = 1e-3;
  double sobolev_dual = 1e-10;
  double gronwall_slack = 1e-2;
  double moser_linf_rel = 0.05;
  double simultaneity = 0.05;        // spread relative to elapsed time
  double mass_identity = 1e-8;
  double boundedness_factor = 1.1;
  double nonnegativity = 1e-8;       // relative to ||u0||_inf
  double cross_solver = 1e-3;
};
const Tolerances& tolerances();

// One verification record; pass is fixed by the caller's comparison.
struct Check {
  std::string name;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
// Passes when value <= tolerance (or >= when at_least).
Check make_check(std::string name, double value, double tolerance, bool at_least = false);
// One tab-separated line per record: name, margin, tolerance, PASS/FAIL.
std::string format_report(const std::vector<Check>& checks);

struct LadderReport {
  std::vector<double> q_values;
  std::vector<double> norms;  // sup over snapshots of the normalized L^q norm
  double linf_ref = 0.0;      // sup over snapshots of max |u|
};

// q_k = 2^k + max(n/alpha, 1/(1-b)); the second entry only counts when b < 1.
std::vector<double> moser_exponents(const ModelParams& p, int k_max);
// Throws DomainError when q_(k_max) > 64.
LadderReport moser_ladder(const Trajectory& traj, const ModelParams& p, int k_max);

struct StroockVaropoulosTerms {
  double dissipation = 0.0;  // int f^(p-1) (-Delta)^(alpha/2) f
  double energy = 0.0;       // 4(p-1)/p^2 ||D^(alpha/2) f^(p/2)||_2^2
};
StroockVaropoulosTerms stroock_varopoulos_terms(const Field& f, double p, double alpha);
// energy - dissipation; the inequality holds when this is <= 0.
double check_stroock_varopoulos(const Field& f, double p, double alpha);

// min over grid times t_m, m >= 1, of tau^(p-1) d^beta tau - (1/p) d^beta tau^p with the L1 derivative.
double check_power_inequality(const caputo::ScalarTrajectory& tau, double p, double beta);

enum class BlowupStatus { NoBlowup, Simultaneous, NonSimultaneous };
std::string to_string(BlowupStatus s);

struct BlowupReport {
  std::vector<double> h_values;
  std::vector<std::optional<double>> detection_times;
  std::optional<double> simultaneity_spread;
  double elapsed = 0.0;
  BlowupStatus status = BlowupStatus::NoBlowup;
};

// norms[i][j] = ||u(times[j])||_(h_values[i]).
struct NormHistory {
  std::vector<double> times;
  std::vector<double> h_values;
  std::vector<std::vector<double>> norms;
};
// Uses the diagnostics rows when every h is among traj.q_values, the snapshots otherwise.
NormHistory norm_history(const Trajectory& traj, const std::vector<double>& h_values);

BlowupReport blowup_monitor(const NormHistory& history, double threshold, double spread_tol = 0.05);
BlowupReport blowup_monitor(const Trajectory& traj, const std::vector<double>& h_values, double threshold,
                            double spread_tol = 0.05);

// phi(x, t) = psi(x) chi(t) with chi(t) = sum_j c_j (T - t)^j, c_0 = 0.
struct TestFunction {
  Field psi;
  caputo::Polynomial chi;
};
// | int_0^T [ int (u - u0) psi dx * D_T^beta chi - chi * (-int u A psi + int u grad v . grad psi
//   + a int u psi - b int u^2 psi) ] dt | with the trapezoid rule over the snapshot times, T the last of them.
double weak_residual(const Trajectory& traj, const TestFunction& phi);

// sup over recorded times of t^(q - n/alpha) ||u(t)||_q^q; q >= n/alpha.
double hypercontractivity_monitor(const Trajectory& traj, double q, const ModelParams& p);

// Largest defect of the discrete mass balance sum_j b_j (M^(m-j) - M^(m-j-1)) = c (a M^(m-1) - b ||u^(m-1)||_2^2),
// c = dt^beta Gamma(2-beta), relative to max(1, max_m M^m). Needs one row per step.
double mass_identity_residual(const Trajectory& traj);

}  // namespace fraks::diagnostics
