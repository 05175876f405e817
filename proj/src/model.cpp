#include "fraks/model.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fraks/caputo.hpp"
#include "fraks/errors.hpp"
#include "fraks/specfun.hpp"

namespace fraks::model {
namespace {

constexpr double kPi = std::numbers::pi;

using spectral::cplx;
using spectral::Spectrum;

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) * specfun::reciprocal_gamma(0.5 * n); }
double ball_volume(int n) { return std::pow(kPi, 0.5 * n) * specfun::reciprocal_gamma(0.5 * n + 1.0); }

void check_sobolev_args(double alpha, int n) {
  if (n < 1) throw DomainError("sobolev_constant: n must be positive");
  if (!(alpha > 0.0)) throw DomainError("sobolev_constant: alpha must be positive");
  if (!(alpha < n)) throw DomainError("sobolev_constant: alpha must be below n (Gamma pole at alpha = n)");
}

double sobolev_from_area(double alpha, int n, double area) {
  const double s2 = specfun::gamma_function(0.5 * (n - alpha)) * specfun::reciprocal_gamma(0.5 * (n + alpha)) *
                    std::pow(area, -alpha / n);
  return std::sqrt(s2);
}

void check_field(const ModelParams& p, const Field& u) {
  if (u.grid.n != p.n || u.grid.L != p.L) throw UsageError("model: field grid does not match n and L of the parameters");
}

}  // namespace

void validate(const ModelParams& p) {
  if (!(p.beta > 0.0 && p.beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (!(p.a >= 0.0) || !std::isfinite(p.a)) throw DomainError("a must be non-negative");
  if (!(p.b >= 0.0) || !std::isfinite(p.b)) throw DomainError("b must be non-negative");
  if (p.n != 1 && p.n != 2) throw DomainError("n must be 1 or 2");
  if (!(p.L > 0.0) || !std::isfinite(p.L)) throw DomainError("L must be positive");
  if (p.eps_mollify && !(*p.eps_mollify > 0.0)) throw DomainError("eps_mollify must be positive when set");
}

bool within_hypotheses(const ModelParams& p) {
  return p.beta > 0.0 && p.beta < 1.0 && p.alpha > 1.0 && p.alpha < 2.0 && p.n >= 2 && p.b > 0.0;
}

double sobolev_constant(double alpha, int n) {
  check_sobolev_args(alpha, n);
  const double s = sobolev_from_area(alpha, n, sphere_area(n));
  const double dual = sobolev_constant_ball_form(alpha, n);
  if (std::fabs(s - dual) > 1e-10 * s) throw DomainError("sobolev_constant: the two forms disagree");
  return s;
}

double sobolev_constant_ball_form(double alpha, int n) {
  check_sobolev_args(alpha, n);
  return sobolev_from_area(alpha, n, n * ball_volume(n));
}

double critical_constant(double alpha, int n, double b) {
  const double r = n / alpha;
  const double denom = r * (r - 1.0 - r * b);
  if (!(b > 0.0) || !(denom > 0.0))
    throw DomainError("critical_constant: b must lie strictly between 0 and 1 - alpha/n");
  const double s = sobolev_constant(alpha, n);
  return 2.0 / (s * s) * (r - 1.0) / denom;
}

double tau5(double alpha, int n, double sigma) {
  const double denom = static_cast<double>(n) * n - alpha * (n - alpha) * (1.0 + sigma);
  if (!(denom > 0.0)) throw DomainError("tau5: denominator must be positive");
  return alpha * alpha / denom;
}

double default_sigma(double b) {
  if (!(b > 0.0 && b < 1.0)) throw DomainError("default_sigma: b must lie in (0, 1)");
  return std::min(0.5, 0.5 * (b / (1.0 - b)));
}

double birth_rate_bound(const ModelParams& p, double u0_norm, double T, double sigma, double C0) {
  if (!(T > 0.0)) throw DomainError("birth_rate_bound: T must be positive");
  if (!(C0 > 0.0)) throw DomainError("birth_rate_bound: C0 must be positive");
  if (!(p.b > 0.0 && p.b < 1.0) || !(sigma > 0.0 && 1.0 + sigma < 1.0 / (1.0 - p.b)))
    throw DomainError("birth_rate_bound: sigma must satisfy 1 < 1 + sigma < 1/(1 - b)");
  const double r = p.n / p.alpha;
  const double cs = critical_constant(p.alpha, p.n, p.b);
  const double num = std::pow(0.5 * cs, r) - std::pow(u0_norm, r);
  if (!(num > 0.0)) return 0.0;
  return std::pow(num / (C0 * T), tau5(p.alpha, p.n, sigma));
}

std::string to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::StrongDamping: return "StrongDamping";
    case RegimeKind::Intermediate: return "Intermediate";
    case RegimeKind::SmallData: return "SmallData";
    case RegimeKind::OutsideTheory: return "OutsideTheory";
  }
  return "?";
}

std::string to_string(RunStatus s) { return s == RunStatus::Completed ? "Completed" : "BlowupSuspected"; }

Regime classify_regime(const ModelParams& p, const Field& u0, const ClassifyOptions& opt) {
  validate(p);
  check_field(p, u0);
  Regime r;
  r.one_minus_alpha_over_n = 1.0 - p.alpha / p.n;
  r.within_hypotheses = within_hypotheses(p);
  r.C0 = opt.C0;
  r.T = opt.T;
  r.norm_n_over_alpha = spectral::lp_norm(u0, std::max(1.0, p.n / p.alpha));
  r.norm_l2 = spectral::lp_norm(u0, 2.0);
  if (p.beta >= 1.0 || p.b <= 0.0) {
    r.kind = RegimeKind::OutsideTheory;
    return r;
  }
  if (p.b >= 1.0) {
    r.kind = RegimeKind::StrongDamping;
    r.admissible = true;
    return r;
  }
  if (p.b > r.one_minus_alpha_over_n) {
    r.kind = RegimeKind::Intermediate;
    r.admissible = true;
    return r;
  }
  r.kind = RegimeKind::SmallData;
  if (p.b == r.one_minus_alpha_over_n) return r;  // C_* has a zero denominator
  r.c_star = critical_constant(p.alpha, p.n, p.b);
  r.sigma = opt.sigma ? *opt.sigma : default_sigma(p.b);
  const double norm = opt.use_l2_norm ? r.norm_l2 : r.norm_n_over_alpha;
  r.a_max = birth_rate_bound(p, norm, opt.T, r.sigma, opt.C0);
  r.admissible = r.norm_n_over_alpha <= 0.5 * *r.c_star && p.a < *r.a_max;
  return r;
}

Spectrum explicit_part(const Field& u, const ModelParams& p) {
  check_field(p, u);
  const auto& g = u.grid;
  const auto& t = spectral::wavevectors(g);
  const Spectrum uhat = spectral::forward(u);
  Spectrum ut = uhat;
  spectral::truncate(ut);
  const Field ub = spectral::inverse(ut);

  Spectrum out{g, std::vector<cplx>(g.spectral_size())};
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = p.a * uhat.coeffs[i];

  if (p.b != 0.0) {
    Field sq(g);
    for (std::size_t i = 0; i < sq.values.size(); ++i) sq.values[i] = ub.values[i] * ub.values[i];
    Spectrum s = spectral::forward(sq);
    spectral::truncate(s);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] -= p.b * s.coeffs[i];
  }

  if (p.chemotaxis_on) {
    Spectrum vhat = p.eps_mollify ? spectral::forward(spectral::mollify(u, *p.eps_mollify)) : uhat;
    vhat.coeffs[0] = 0.0;
    for (std::size_t i = 1; i < vhat.coeffs.size(); ++i) vhat.coeffs[i] /= t.k2[i];
    spectral::truncate(vhat);
    for (int axis = 0; axis < g.n; ++axis) {
      const auto& k = axis == 0 ? t.kx : t.ky;
      const auto& nyq = axis == 0 ? t.nyq_x : t.nyq_y;
      Spectrum gv = vhat;
      for (std::size_t i = 0; i < gv.coeffs.size(); ++i) gv.coeffs[i] *= nyq[i] ? cplx(0.0) : cplx(0.0, k[i]);
      Field flux = spectral::inverse(gv);
      for (std::size_t i = 0; i < flux.values.size(); ++i) flux.values[i] *= ub.values[i];
      Spectrum fh = spectral::forward(flux);
      spectral::truncate(fh);
      for (std::size_t i = 1; i < out.coeffs.size(); ++i)
        if (!nyq[i]) out.coeffs[i] -= cplx(0.0, k[i]) * fh.coeffs[i];
    }
  }
  return out;
}

Field rhs(const Field& u, const ModelParams& p) {
  validate(p);
  Spectrum s = explicit_part(u, p);
  const Spectrum uhat = spectral::forward(u);
  const auto& t = spectral::wavevectors(u.grid);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] -= std::pow(t.k2[i], 0.5 * p.alpha) * uhat.coeffs[i];
  return spectral::inverse(s);
}

double dt_guard_value(const ModelParams& p, const Field& u0, double dt) {
  const double c = std::pow(dt, p.beta) * specfun::gamma_function(2.0 - p.beta);
  const double umax = spectral::lp_norm(u0, std::numeric_limits<double>::infinity());
  double rate = p.a + 2.0 * p.b * umax;
  if (p.chemotaxis_on) {
    const double kmax = 2.0 * kPi / p.L * static_cast<double>(u0.grid.dealias_cutoff());
    double gmax = 0.0;
    for (const auto& comp : spectral::solve_chemoattractant(u0))
      gmax = std::max(gmax, spectral::lp_norm(comp, std::numeric_limits<double>::infinity()));
    rate += kmax * gmax + umax;
  }
  return c * rate;
}

Stepper::Stepper(const ModelParams& p, const Field& u0, double dt, bool clip_negative)
    : p_(p), dt_(dt), clip_(clip_negative) {
  validate(p);
  check_field(p, u0);
  if (!(dt > 0.0)) throw DomainError("stepper: dt must be positive");
  c_ = std::pow(dt, p.beta) * specfun::gamma_function(2.0 - p.beta);
  uhat_ = spectral::forward(u0);
  spectral::truncate(uhat_);  // initial data projected onto the 2/3 band
  u_ = spectral::inverse(uhat_);
  const auto& t = spectral::wavevectors(u0.grid);
  for (std::size_t i = 0; i < t.keep.size(); ++i) {
    if (!t.keep[i]) continue;
    band_.push_back(i);
    lambda_.push_back(std::pow(t.k2[i], 0.5 * p.alpha));
  }
}

void Stepper::ensure_weights(std::size_t count) {
  if (weights_.size() >= count) return;
  std::size_t cap = std::max<std::size_t>(256, 2 * weights_.size());
  while (cap < count) cap *= 2;
  if (p_.beta < 1.0) {
    weights_ = caputo::l1_weights(p_.beta, cap);
  } else {
    weights_.assign(cap, 0.0);
    weights_[0] = 1.0;
  }
}

// far_[p] = sum_{i < m0} b_{m0+p-i} d^i for p < kBlock, one GEMM per history chunk.
void Stepper::refresh_far_history(std::size_t m0) {
  const std::size_t W = 2 * band_.size();
  far_.assign(kBlock * W, 0.0);
  block_start_ = m0;
  const std::size_t have = m0 - 1;  // diffs d^1..d^(m0-1)
  std::vector<double> toeplitz(kBlock * kChunk);
  for (std::size_t c = 0; c * kChunk < have; ++c) {
    const std::size_t i0 = c * kChunk + 1;
    const std::size_t rows = std::min(kChunk, have - c * kChunk);
    for (std::size_t pp = 0; pp < kBlock; ++pp)
      for (std::size_t q = 0; q < rows; ++q) toeplitz[pp * rows + q] = weights_[m0 + pp - (i0 + q)];
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> A(toeplitz.data(), kBlock, rows);
    Eigen::Map<const RowMat> B(chunks_[c].data(), rows, W);
    Eigen::Map<RowMat> C(far_.data(), kBlock, W);
    C.noalias() += A * B;
  }
}

const Field& Stepper::step() {
  const std::size_t m = m_ + 1;
  const std::size_t B = band_.size();
  const std::size_t W = 2 * B;
  const Spectrum nl = explicit_part(u_, p_);
  last_source_mean_ = nl.coeffs[0].real();

  std::vector<double> acc(W);
  for (std::size_t i = 0; i < B; ++i) {
    acc[2 * i] = uhat_.coeffs[band_[i]].real();
    acc[2 * i + 1] = uhat_.coeffs[band_[i]].imag();
  }
  if (p_.beta < 1.0 && m > 1) {
    ensure_weights(m + kBlock);
    if (m >= block_start_ + kBlock || block_start_ == 0) refresh_far_history(m);
    const double* far = far_.data() + (m - block_start_) * W;
    for (std::size_t i = 0; i < W; ++i) acc[i] -= far[i];
    for (std::size_t k = block_start_; k < m; ++k) {  // d^k inside the current block
      const double bj = weights_[m - k];
      const double* d = chunks_[(k - 1) / kChunk].data() + ((k - 1) % kChunk) * W;
      for (std::size_t i = 0; i < W; ++i) acc[i] -= bj * d[i];
    }
  }
  Spectrum next{uhat_.grid, std::vector<cplx>(uhat_.coeffs.size())};
  for (std::size_t i = 0; i < B; ++i) {
    const std::size_t idx = band_[i];
    next.coeffs[idx] = (cplx(acc[2 * i], acc[2 * i + 1]) + c_ * nl.coeffs[idx]) / (1.0 + c_ * lambda_[i]);
  }
  u_ = spectral::inverse(next);
  if (clip_) {
    for (double& v : u_.values) v = std::max(v, 0.0);
    next = spectral::forward(u_);
    spectral::truncate(next);
    u_ = spectral::inverse(next);
  }
  if (p_.beta < 1.0) {
    if ((m - 1) % kChunk == 0) chunks_.emplace_back(kChunk * W, 0.0);
    double* d = chunks_.back().data() + ((m - 1) % kChunk) * W;
    for (std::size_t i = 0; i < B; ++i) {
      const cplx diff = next.coeffs[band_[i]] - uhat_.coeffs[band_[i]];
      d[2 * i] = diff.real();
      d[2 * i + 1] = diff.imag();
    }
  }
  uhat_ = std::move(next);
  m_ = m;
  return u_;
}

DiagnosticsRow diagnostics_row(const Field& u, const ModelParams& p, double t, const std::vector<double>& q_values,
                        const std::vector<double>& u0_qq) {
  DiagnosticsRow r;
  r.t = t;
  r.mass = spectral::integral(u);
  r.min_u = spectral::min_value(u);
  r.linf = spectral::lp_norm(u, std::numeric_limits<double>::infinity());
  r.l1 = spectral::lp_norm(u, 1.0);
  r.l2 = spectral::lp_norm(u, 2.0);
  for (double q : q_values) r.lq.push_back(spectral::lp_norm(u, q));
  r.seminorm = spectral::sobolev_seminorm(u, 0.5 * p.alpha);
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    double env = u0_qq[i];
    if (p.a > 0.0 && t > 0.0) {
      const double z = p.a * q_values[i] * std::pow(t, p.beta);
      env = z <= specfun::kZMax ? u0_qq[i] * specfun::mittag_leffler(p.beta, z)
                                : std::numeric_limits<double>::infinity();
    }
    r.envelope.push_back(env);
  }
  return r;
}

Trajectory simulate(const ModelParams& p, const Field& u0, double dt, double T, const SimulateOptions& opt) {
  validate(p);
  check_field(p, u0);
  if (!(dt > 0.0) || !(T >= dt)) throw DomainError("simulate: need 0 < dt <= T");
  if (opt.check_dt_guard) {
    const double g = dt_guard_value(p, u0, dt);
    if (g > opt.dt_guard)
      throw DomainError("simulate: dt guard violated (" + std::to_string(g) + " > " + std::to_string(opt.dt_guard) +
                        "); reduce dt");
  }
  Trajectory tr;
  tr.params = p;
  tr.dt = dt;
  tr.q_values = opt.q_values;
  Stepper st(p, u0, dt, opt.clip_negative);
  const Field& start = st.current();
  std::vector<double> u0_qq;
  for (double q : opt.q_values) u0_qq.push_back(std::pow(spectral::lp_norm(start, q), q));
  const double ceiling = opt.blowup_factor * spectral::lp_norm(start, std::numeric_limits<double>::infinity());

  tr.times.push_back(0.0);
  tr.rows.push_back(diagnostics_row(start, p, 0.0, opt.q_values, u0_qq));
  tr.snapshots.push_back({0.0, start});

  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  for (std::size_t m = 1; m <= steps; ++m) {
    const Field& u = st.step();
    const double t = st.time();
    bool finite = true;
    for (double v : u.values)
      if (!std::isfinite(v)) {
        finite = false;
        break;
      }
    if (!finite || spectral::lp_norm(u, std::numeric_limits<double>::infinity()) > ceiling) {
      tr.status = RunStatus::BlowupSuspected;
      tr.message = finite ? "sup norm exceeded the blow-up ceiling at t = " + std::to_string(t)
                          : "non-finite values at t = " + std::to_string(t);
      if (finite) {
        tr.times.push_back(t);
        tr.rows.push_back(diagnostics_row(u, p, t, opt.q_values, u0_qq));
        tr.rows.back().source_mean = st.last_source_mean();
        tr.snapshots.push_back({t, u});
      }
      return tr;
    }
    tr.times.push_back(t);
    tr.rows.push_back(diagnostics_row(u, p, t, opt.q_values, u0_qq));
    tr.rows.back().source_mean = st.last_source_mean();
    const bool stride_hit = opt.snapshot_stride > 0 && m % opt.snapshot_stride == 0;
    if (stride_hit || m == steps) tr.snapshots.push_back({t, u});
  }
  return tr;
}

}  // namespace fraks::model
