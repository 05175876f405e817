#include "fraks/mild.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fraks/errors.hpp"
#include "fraks/specfun.hpp"

namespace fraks::mild {
namespace {

using spectral::cplx;
using spectral::Spectrum;

// E_{beta,gamma}(z) for z <= 0, including z below the documented range of mittag_leffler.
double ml_nonpositive(double beta, double gamma, double z) {
  if (z >= specfun::kZMin) return specfun::mittag_leffler({beta, gamma}, z);
  if (beta == 1.0 && gamma == 1.0) return std::exp(z);
  return specfun::detail::ml_asymptotic_negative(beta, gamma, -z);
}

// Groups spectrum indices by their |k|^2 so each distinct value is evaluated once.
struct ModeGroups {
  std::vector<double> k2;          // distinct values
  std::vector<std::size_t> group;  // group of each listed index
};

ModeGroups group_modes(const std::vector<double>& k2_of_index, const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return k2_of_index[indices[a]] < k2_of_index[indices[b]]; });
  ModeGroups g;
  g.group.resize(indices.size());
  for (std::size_t o : order) {
    const double v = k2_of_index[indices[o]];
    if (g.k2.empty() || g.k2.back() != v) g.k2.push_back(v);
    g.group[o] = g.k2.size() - 1;
  }
  return g;
}

template <class F>
Field apply_radial(const Field& u, F&& multiplier) {
  const auto& t = spectral::wavevectors(u.grid);
  Spectrum s = spectral::forward(u);
  std::vector<std::size_t> all(s.coeffs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const ModeGroups g = group_modes(t.k2, all);
  std::vector<double> value(g.k2.size());
  for (std::size_t i = 0; i < g.k2.size(); ++i) value[i] = multiplier(g.k2[i]);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] *= value[g.group[i]];
  return spectral::inverse(s);
}

void check_orders(double beta, double alpha, const char* what) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError(std::string(what) + ": beta must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError(std::string(what) + ": alpha must lie in (0, 2]");
}

class PicardSolver {
 public:
  PicardSolver(const Field& u0, const ModelParams& p, const PicardConfig& cfg)
      : p_(p), grid_(u0.grid), M_(cfg.steps * cfg.quad_nodes), h_(cfg.T / static_cast<double>(M_)) {
    const auto& t = spectral::wavevectors(grid_);
    for (std::size_t i = 0; i < t.keep.size(); ++i)
      if (t.keep[i]) band_.push_back(i);
    weight_.reserve(band_.size());
    for (std::size_t i : band_) weight_.push_back(t.weight[i]);
    const Spectrum s = spectral::forward(u0);
    u0_.reserve(band_.size());
    for (std::size_t i : band_) u0_.push_back(s.coeffs[i]);
    groups_ = group_modes(t.k2, band_);
    build_tables();
    if (cfg.frozen_drift && p.chemotaxis_on) {
      Field start = to_field(u0_);
      drift_ = spectral::solve_chemoattractant(p.eps_mollify ? spectral::mollify(start, *p.eps_mollify) : start);
    }
  }

  std::size_t panels() const { return M_; }
  double h() const { return h_; }
  const std::vector<cplx>& initial() const { return u0_; }

  Field to_field(const std::vector<cplx>& band) const {
    Spectrum s{grid_, std::vector<cplx>(grid_.spectral_size())};
    for (std::size_t b = 0; b < band_.size(); ++b) s.coeffs[band_[b]] = band[b];
    return spectral::inverse(s);
  }

  std::vector<std::vector<cplx>> sweep(const std::vector<std::vector<cplx>>& U) const {
    const std::size_t B = band_.size();
    const std::size_t G = groups_.k2.size();
    std::vector<std::vector<cplx>> f(M_ + 1);
    for (std::size_t m = 0; m <= M_; ++m) f[m] = forcing(U[m]);
    std::vector<std::vector<cplx>> avg(M_);
    for (std::size_t j = 0; j < M_; ++j) {
      avg[j].resize(B);
      for (std::size_t b = 0; b < B; ++b) avg[j][b] = 0.5 * (f[j][b] + f[j + 1][b]);
    }
    std::vector<std::vector<cplx>> out(M_ + 1, std::vector<cplx>(B));
    for (std::size_t m = 0; m <= M_; ++m) {
      auto& o = out[m];
      const double* e0 = &prop_[m * G];
      for (std::size_t b = 0; b < B; ++b) o[b] = e0[groups_.group[b]] * u0_[b];
      for (std::size_t j = 0; j < m; ++j) {
        const double* w = &panel_[(m - 1 - j) * G];
        const auto& a = avg[j];
        for (std::size_t b = 0; b < B; ++b) o[b] += w[groups_.group[b]] * a[b];
      }
    }
    return out;
  }

  double l2_distance(const std::vector<cplx>& x, const std::vector<cplx>& y) const {
    double acc = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b) acc += weight_[b] * std::norm(x[b] - y[b]);
    return std::sqrt(grid_.volume() * acc);
  }

 private:
  // prop_[m][g] = E_beta(-lambda t_m^beta); panel_[i][g] = F((i+1)h) - F(ih) with
  // F(tau) = tau^beta E_{beta,beta+1}(-lambda tau^beta), the antiderivative of the resolvent kernel.
  void build_tables() {
    const std::size_t G = groups_.k2.size();
    prop_.assign((M_ + 1) * G, 0.0);
    panel_.assign(M_ * G, 0.0);
    std::vector<double> F(M_ + 1);
    for (std::size_t g = 0; g < G; ++g) {
      const double lam = std::pow(groups_.k2[g], 0.5 * p_.alpha);
      for (std::size_t m = 0; m <= M_; ++m) {
        const double tb = std::pow(static_cast<double>(m) * h_, p_.beta);
        prop_[m * G + g] = lam == 0.0 ? 1.0 : ml_nonpositive(p_.beta, 1.0, -lam * tb);
        F[m] = m == 0 ? 0.0
                      : tb * (lam == 0.0 ? specfun::reciprocal_gamma(p_.beta + 1.0)
                                         : ml_nonpositive(p_.beta, p_.beta + 1.0, -lam * tb));
      }
      for (std::size_t i = 0; i < M_; ++i) panel_[i * G + g] = F[i + 1] - F[i];
    }
  }

  std::vector<cplx> forcing(const std::vector<cplx>& band) const {
    const Field u = to_field(band);
    Spectrum s;
    if (drift_.empty()) {
      s = model::explicit_part(u, p_);
    } else {
      ModelParams local = p_;
      local.chemotaxis_on = false;
      s = model::explicit_part(u, local);
      const Spectrum div = spectral::forward(spectral::chemotaxis_divergence(u, drift_));
      for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] -= div.coeffs[i];
    }
    std::vector<cplx> out(band_.size());
    for (std::size_t b = 0; b < band_.size(); ++b) out[b] = s.coeffs[band_[b]];
    return out;
  }

  ModelParams p_;
  spectral::Grid grid_;
  std::size_t M_;
  double h_;
  std::vector<std::size_t> band_;
  std::vector<double> weight_;
  std::vector<cplx> u0_;
  ModeGroups groups_;
  std::vector<double> prop_;
  std::vector<double> panel_;
  spectral::VectorField drift_;
};

}  // namespace

void validate(const PicardConfig& cfg) {
  if (cfg.max_iters < 1) throw DomainError("PicardConfig: max_iters must be at least 1");
  if (cfg.quad_nodes < 4) throw DomainError("PicardConfig: quad_nodes must be at least 4");
  if (cfg.steps < 1) throw DomainError("PicardConfig: steps must be at least 1");
  if (!(cfg.tol > 0.0)) throw DomainError("PicardConfig: tol must be positive");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw DomainError("PicardConfig: T must be positive");
}

Field propagator_apply(const Field& u, double t, double beta, double alpha) {
  check_orders(beta, alpha, "propagator_apply");
  if (!(t >= 0.0)) throw DomainError("propagator_apply: t must be non-negative");
  if (t == 0.0) return u;
  const double tb = std::pow(t, beta);
  return apply_radial(u, [&](double k2) {
    return k2 == 0.0 ? 1.0 : ml_nonpositive(beta, 1.0, -tb * std::pow(k2, 0.5 * alpha));
  });
}

Field resolvent_apply(const Field& u, double t, double beta, double alpha) {
  check_orders(beta, alpha, "resolvent_apply");
  if (!(t > 0.0)) throw DomainError("resolvent_apply: t must be positive");
  const double tb = std::pow(t, beta);
  const double scale = std::pow(t, beta - 1.0);
  return apply_radial(u, [&](double k2) {
    const double e = k2 == 0.0 ? specfun::reciprocal_gamma(beta)
                               : ml_nonpositive(beta, beta, -tb * std::pow(k2, 0.5 * alpha));
    return scale * e;
  });
}

PicardResult picard_iterate(const Field& u0, const ModelParams& p, const PicardConfig& cfg) {
  model::validate(p);
  validate(cfg);
  if (u0.grid.n != p.n || u0.grid.L != p.L) throw UsageError("picard_iterate: field grid does not match n and L");
  for (double v : u0.values)
    if (!std::isfinite(v)) throw DomainError("picard_iterate: u0 must be finite");

  const PicardSolver solver(u0, p, cfg);
  const std::size_t M = solver.panels();
  std::vector<std::vector<cplx>> U(M + 1, solver.initial());

  auto max_distance = [&](const auto& X, const auto& Y) {
    double d = 0.0;
    for (std::size_t m = 0; m <= M; ++m) d = std::max(d, solver.l2_distance(X[m], Y[m]));
    return d;
  };

  PicardResult res;
  bool converged = false;
  for (std::size_t n = 1; n <= cfg.max_iters; ++n) {
    auto next = solver.sweep(U);
    const double diff = max_distance(next, U);
    U = std::move(next);
    res.differences.push_back(diff);
    res.iterations = n;
    if (!std::isfinite(diff)) break;
    if (diff <= cfg.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw IterationError("picard_iterate: no convergence after " + std::to_string(res.iterations) + " sweeps",
                         res.differences);
  res.duhamel_residual = max_distance(solver.sweep(U), U);

  auto& tr = res.trajectory;
  tr.params = p;
  tr.dt = solver.h() * static_cast<double>(cfg.quad_nodes);
  tr.q_values = {2.0, 4.0};
  const Field start = solver.to_field(U[0]);
  std::vector<double> u0_qq;
  for (double q : tr.q_values) u0_qq.push_back(std::pow(spectral::lp_norm(start, q), q));
  for (std::size_t s = 0; s <= cfg.steps; ++s) {
    const std::size_t m = s * cfg.quad_nodes;
    const double t = static_cast<double>(m) * solver.h();
    Field u = solver.to_field(U[m]);
    tr.times.push_back(t);
    tr.rows.push_back(model::diagnostics_row(u, p, t, tr.q_values, u0_qq));
    tr.snapshots.push_back({t, std::move(u)});
  }
  return res;
}

double smoothing_threshold(int n, double alpha, double r) {
  const double d = n - 2.0 * r * alpha;
  return d > 0.0 ? n * r / d : std::numeric_limits<double>::infinity();
}

SmoothingRate smoothing_rate_check(const Field& u0, double beta, double alpha, double r, double p,
                                   const std::vector<double>& t_grid) {
  check_orders(beta, alpha, "smoothing_rate_check");
  if (!(r >= 1.0 && p >= r)) throw DomainError("smoothing_rate_check: need 1 <= r <= p");
  const int n = u0.grid.n;
  if (!(p < smoothing_threshold(n, alpha, r)))
    throw DomainError("smoothing_rate_check: p must lie below zeta_1 = nr/(n - 2r alpha)");
  if (t_grid.size() < 2) throw DomainError("smoothing_rate_check: at least two times are required");
  const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
  if (!(*lo > 0.0) || !(*hi >= 10.0 * *lo)) throw DomainError("smoothing_rate_check: t_grid must span a decade of t > 0");

  SmoothingRate out;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  out.theoretical_exponent = -(n * beta / alpha) * (1.0 / r - inv_p) + beta - 1.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (double t : t_grid) {
    const double x = std::log(t);
    const double y = std::log(spectral::lp_norm(resolvent_apply(u0, t, beta, alpha), p));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(t_grid.size());
  out.fitted_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

}  // namespace fraks::mild
