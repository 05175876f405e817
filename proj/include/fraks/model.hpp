#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fraks/spectral.hpp"

namespace fraks::model {

using spectral::Field;

struct ModelParams {
  double beta = 0.5;   // Caputo order, (0, 1]
  double alpha = 1.5;  // Laplacian order, (0, 2]
  double a = 0.0;      // birth rate
  double b = 1.0;      // damping
  int n = 2;
  double L = 20.0;
  std::optional<double> eps_mollify;
  bool chemotaxis_on = true;
};

void validate(const ModelParams& p);
// beta in (0,1), alpha in (1,2), n >= 2, b > 0.
bool within_hypotheses(const ModelParams& p);

// S_{alpha,n} with S^2 = Gamma((n-alpha)/2) / Gamma((n+alpha)/2) |S^(n-1)|^(-alpha/n).
double sobolev_constant(double alpha, int n);
// Same constant with |S^(n-1)| written as n times the unit-ball volume.
double sobolev_constant_ball_form(double alpha, int n);

// C_* = 2 S^-2 (n/alpha - 1) / ((n/alpha)(n/alpha - 1 - (n/alpha) b)), 0 < b < 1 - alpha/n.
double critical_constant(double alpha, int n, double b);

// tau_5 = alpha^2 / (n^2 - alpha (n - alpha)(1 + sigma)).
double tau5(double alpha, int n, double sigma);

// Midpoint of the window 0 < sigma < b/(1-b), capped at 0.5.
double default_sigma(double b);

// a_max = (((C_*/2)^(n/alpha) - u0_norm^(n/alpha)) / (C0 T))^tau_5, clamped at 0.
double birth_rate_bound(const ModelParams& p, double u0_norm, double T, double sigma, double C0);

enum class RegimeKind { StrongDamping, Intermediate, SmallData, OutsideTheory };
std::string to_string(RegimeKind k);

struct Regime {
  RegimeKind kind = RegimeKind::OutsideTheory;
  double one_minus_alpha_over_n = 0.0;
  std::optional<double> c_star;
  std::optional<double> a_max;
  bool admissible = false;
  bool within_hypotheses = false;
  // Reported for every kind; the small-data test uses norm_n_over_alpha unless use_l2_norm.
  double norm_n_over_alpha = 0.0;
  double norm_l2 = 0.0;
  double sigma = 0.0;
  double C0 = 1.0;
  double T = 1.0;
};

struct ClassifyOptions {
  double T = 1.0;
  double C0 = 1.0;
  std::optional<double> sigma;
  bool use_l2_norm = false;
};

Regime classify_regime(const ModelParams& p, const Field& u0, const ClassifyOptions& opt = {});

// -(-Delta)^(alpha/2) u - div(u grad v) + a u - b u^2, with -Delta v = J_eps * u when
// eps_mollify is set. Quadratic terms are dealiased.
Field rhs(const Field& u, const ModelParams& p);

// Explicit part of rhs: everything except the fractional diffusion, in spectral form.
spectral::Spectrum explicit_part(const Field& u, const ModelParams& p);

enum class RunStatus { Completed, BlowupSuspected };
std::string to_string(RunStatus s);

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double min_u = 0.0;
  double linf = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  std::vector<double> lq;          // one per SimulateOptions::q_values
  double seminorm = 0.0;           // ||D^(alpha/2) u||_2
  std::vector<double> envelope;    // Gronwall envelope of ||u||_q^q, one per q_values
  double source_mean = 0.0;        // zero mode of the explicit part driving this step
};

// One diagnostics row; u0_qq holds ||u0||_q^q per q for the envelope.
DiagnosticsRow diagnostics_row(const Field& u, const ModelParams& p, double t, const std::vector<double>& q_values,
                               const std::vector<double>& u0_qq);

struct TimedField {
  double t = 0.0;
  Field field;
};

struct Trajectory {
  ModelParams params;
  double dt = 0.0;
  std::vector<double> q_values;
  std::vector<double> times;
  std::vector<TimedField> snapshots;
  std::vector<DiagnosticsRow> rows;
  RunStatus status = RunStatus::Completed;
  std::string message;
};

struct SimulateOptions {
  std::size_t snapshot_stride = 0;  // 0 keeps only the first and last states
  std::vector<double> q_values{2.0, 4.0};
  double blowup_factor = 1e6;       // ceiling = factor * ||u0||_inf
  bool clip_negative = false;
  // dt^beta Gamma(2-beta) (k_max |grad v0|_inf + (1 + 2b)|u0|_inf + a) must stay below this.
  double dt_guard = 1.0;
  bool check_dt_guard = true;
};

// Left-hand side of the dt guard for the given data.
double dt_guard_value(const ModelParams& p, const Field& u0, double dt);

// IMEX-L1 march: per mode (1 + c|k|^alpha) u^m = u^(m-1) - sum_{j>=1} b_j d^(m-j) + c N(u^(m-1)),
// c = dt^beta Gamma(2-beta). History is held as spectral differences inside the 2/3 band.
class Stepper {
 public:
  Stepper(const ModelParams& p, const Field& u0, double dt, bool clip_negative = false);
  // Advances one step and returns the new state.
  const Field& step();
  const Field& current() const { return u_; }
  std::size_t steps_taken() const { return m_; }
  double time() const { return static_cast<double>(m_) * dt_; }
  // Zero mode of the explicit part used by the last step.
  double last_source_mean() const { return last_source_mean_; }

 private:
  static constexpr std::size_t kBlock = 64;   // steps sharing one far-history GEMM
  static constexpr std::size_t kChunk = 256;  // stored differences per history chunk
  void ensure_weights(std::size_t count);
  void refresh_far_history(std::size_t m0);

  ModelParams p_;
  double dt_;
  bool clip_;
  double c_;
  std::size_t m_ = 0;
  std::vector<std::size_t> band_;  // spectrum indices inside the 2/3 band
  std::vector<double> lambda_;     // |k|^alpha on the band
  std::vector<double> weights_;
  // d^i = u^i - u^(i-1) on the band, interleaved re/im, kChunk rows per chunk.
  std::vector<std::vector<double>> chunks_;
  std::vector<double> far_;
  std::size_t block_start_ = 0;
  spectral::Spectrum uhat_;
  Field u_;
  double last_source_mean_ = 0.0;
};

Trajectory simulate(const ModelParams& p, const Field& u0, double dt, double T, const SimulateOptions& opt = {});

}  // namespace fraks::model
