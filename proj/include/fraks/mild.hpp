#pragma once

#include <cstddef>
#include <vector>

#include "fraks/model.hpp"
#include "fraks/spectral.hpp"

namespace fraks::mild {

using model::ModelParams;
using spectral::Field;

struct PicardConfig {
  std::size_t max_iters = 40;
  std::size_t quad_nodes = 8;  // panels per output step
  double tol = 1e-10;          // on max_t ||u_n(t) - u_(n-1)(t)||_2
  double T = 0.5;
  std::size_t steps = 50;      // output steps over [0, T]
  bool frozen_drift = false;   // grad v taken from u0 for every iterate
};

void validate(const PicardConfig& cfg);

// Multiplies each mode by E_beta(-t^beta |k|^alpha).
Field propagator_apply(const Field& u, double t, double beta, double alpha);

// t^(beta-1) E_{beta,beta}(-t^beta |k|^alpha) per mode.
Field resolvent_apply(const Field& u, double t, double beta, double alpha);

struct PicardResult {
  model::Trajectory trajectory;     // output steps only
  std::vector<double> differences;  // ||u_n - u_(n-1)||, n = 1, 2, ...
  std::size_t iterations = 0;
  double duhamel_residual = 0.0;    // one further sweep applied to the returned iterate
};

// Picard sweeps of u_n(t) = E_beta(-t^beta A) u0 + int_0^t T(t-s) f(u_(n-1)(s)) ds, starting from u_0(t) = u0,
// with T(tau) = tau^(beta-1) E_{beta,beta}(-tau^beta A). The kernel is integrated exactly on each panel and
// f is the panel average of its endpoint values. u0 is projected onto the 2/3 band.
// Throws IterationError with the difference sequence when max_iters is reached.
PicardResult picard_iterate(const Field& u0, const ModelParams& p, const PicardConfig& cfg);

// zeta_1 = n r / (n - 2 r alpha) if n > 2 r alpha, infinity otherwise.
double smoothing_threshold(int n, double alpha, double r);

struct SmoothingRate {
  double theoretical_exponent = 0.0;
  double fitted_exponent = 0.0;
};

// Least-squares slope of log ||resolvent_apply(u0, t)||_p against log t, next to
// -(n beta / alpha)(1/r - 1/p) + beta - 1.
SmoothingRate smoothing_rate_check(const Field& u0, double beta, double alpha, double r, double p,
                                   const std::vector<double>& t_grid);

}  // namespace fraks::mild
