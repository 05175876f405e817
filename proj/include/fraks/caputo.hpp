#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fraks/errors.hpp"
#include "fraks/spectral.hpp"

namespace fraks::caputo {

// b_j = (j+1)^(1-beta) - j^(1-beta), j = 0..m-1; beta in (0, 1).
std::vector<double> l1_weights(double beta, std::size_t m);

// Uniformly spaced past states u^0..u^m; index 0 is the initial value.
template <class T>
class HistoryBuffer {
 public:
  HistoryBuffer(double dt, T initial) : dt_(dt) {
    if (!(dt > 0.0)) throw UsageError("HistoryBuffer: dt must be positive");
    states_.push_back(std::move(initial));
  }
  void push(T state) { states_.push_back(std::move(state)); }
  double dt() const { return dt_; }
  std::size_t size() const { return states_.size(); }
  const T& operator[](std::size_t i) const { return states_[i]; }
  const T& back() const { return states_.back(); }
  const std::vector<T>& states() const { return states_; }

 private:
  double dt_;
  std::vector<T> states_;
};

// L1 approximation of the Caputo derivative at the latest time:
// dt^-beta / Gamma(2-beta) * sum_j b_j (u^(m-j) - u^(m-j-1)).
double caputo_apply(const HistoryBuffer<double>& h, double beta);
spectral::Field caputo_apply(const HistoryBuffer<spectral::Field>& h, double beta);

struct ScalarTrajectory {
  std::vector<double> times;
  std::vector<double> values;
};

struct OdeOptions {
  // Part lambda*u of rhs treated implicitly in closed form; the rest by fixed point.
  double linear = 0.0;
  double tol = 1e-12;
  int max_iters = 50;
  double damping = 1.0;
};

// L1 march of d^beta u = rhs(u), beta in (0, 1]; beta = 1 is backward Euler.
// Throws IntegrationError when the fixed point stalls.
ScalarTrajectory solve_fractional_ode(double beta, const std::function<double(double)>& rhs, double u0, double dt,
                                      double T, const OdeOptions& opt = {});

// z0 E_beta(c1 t^beta) + Gamma(beta) E_{beta,beta}(c1 t^beta) I^beta c2 for constant c2,
// where I^beta c2 = c2 t^beta / Gamma(1+beta).
double gronwall_bound(double z0, double c1, double c2_const, double beta, double t);

// Sum_j c[j] s^j; the meaning of s (t or T-t) is fixed by the caller.
struct Polynomial {
  std::vector<double> c;
  double operator()(double s) const;
};

// Left Caputo derivative at t of p(t) = sum c_j t^j.
double caputo_left_poly(const Polynomial& p, double beta, double t);
// Left Riemann-Liouville derivative at t > 0 of p(t) = sum c_j t^j.
double riemann_liouville_left_poly(const Polynomial& p, double beta, double t);
// Right Caputo derivative on (t, T) of q(T - t) = sum c_j (T - t)^j.
double caputo_right_poly(const Polynomial& q, double beta, double T, double t);

}  // namespace fraks::caputo
