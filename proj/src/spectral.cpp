#include "fraks/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "fraks/errors.hpp"
#include "fraks/specfun.hpp"

namespace fraks::spectral {
namespace {

constexpr double kPi = std::numbers::pi;

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using GridKey = std::tuple<int, std::size_t, std::uint64_t>;

GridKey key_of(const Grid& g) { return {g.n, g.N, std::bit_cast<std::uint64_t>(g.L)}; }

class Workspace {
 public:
  explicit Workspace(const Grid& g) : grid_(g) {
    real_ = fftw_alloc_real(g.size());
    spec_ = fftw_alloc_complex(g.spectral_size());
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int N = static_cast<int>(g.N);
    if (g.n == 1) {
      fwd_ = fftw_plan_dft_r2c_1d(N, real_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_1d(N, spec_, real_, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_r2c_2d(N, N, real_, spec_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(N, N, spec_, real_, FFTW_ESTIMATE);
    }
    build_tables();
  }
  ~Workspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  Spectrum forward(const Field& u) {
    std::copy(u.values.begin(), u.values.end(), real_);
    fftw_execute(fwd_);
    Spectrum s{grid_, std::vector<cplx>(grid_.spectral_size())};
    const double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] = cplx(spec_[i][0], spec_[i][1]) * scale;
    return s;
  }

  Field inverse(const Spectrum& s) {
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
      spec_[i][0] = s.coeffs[i].real();
      spec_[i][1] = s.coeffs[i].imag();
    }
    fftw_execute(bwd_);
    return Field(grid_, std::vector<double>(real_, real_ + grid_.size()));
  }

  const Wavevectors& tables() const { return tables_; }

 private:
  void build_tables() {
    const std::size_t N = grid_.N;
    const std::size_t half = N / 2 + 1;
    const std::size_t cut = grid_.dealias_cutoff();
    const double k0 = 2.0 * kPi / grid_.L;
    const std::size_t M = grid_.spectral_size();
    auto& t = tables_;
    t.kx.assign(M, 0.0);
    t.ky.assign(M, 0.0);
    t.k2.assign(M, 0.0);
    t.weight.assign(M, 1.0);
    t.keep.assign(M, false);
    t.nyq_x.assign(M, false);
    t.nyq_y.assign(M, false);
    auto signed_index = [N](std::size_t i) {
      return i <= N / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(N);
    };
    const std::size_t rows = grid_.n == 1 ? 1 : N;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::size_t idx = i * half + j;
        const long mlast = static_cast<long>(j);
        const double w = (j == 0 || j == N / 2) ? 1.0 : 2.0;
        if (grid_.n == 1) {
          t.kx[idx] = k0 * static_cast<double>(mlast);
          t.nyq_x[idx] = (j == N / 2);
          t.keep[idx] = static_cast<std::size_t>(mlast) <= cut;
        } else {
          const long mi = signed_index(i);
          t.kx[idx] = k0 * static_cast<double>(mi);
          t.ky[idx] = k0 * static_cast<double>(mlast);
          t.nyq_x[idx] = (i == N / 2);
          t.nyq_y[idx] = (j == N / 2);
          t.keep[idx] = static_cast<std::size_t>(std::labs(mi)) <= cut && static_cast<std::size_t>(mlast) <= cut;
        }
        t.k2[idx] = t.kx[idx] * t.kx[idx] + t.ky[idx] * t.ky[idx];
        t.weight[idx] = w;
      }
    }
  }

  Grid grid_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  Wavevectors tables_;
};

Workspace& workspace(const Grid& g) {
  thread_local std::map<GridKey, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[key_of(g)];
  if (!slot) {
    validate(g);
    slot = std::make_unique<Workspace>(g);
  }
  return *slot;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw UsageError(std::string(what) + ": grid mismatch");
}

// Derivative along one axis; Nyquist modes of that axis are dropped to keep the
// result real.
Spectrum derivative(const Spectrum& s, int axis) {
  const auto& t = wavevectors(s.grid);
  Spectrum d{s.grid, std::vector<cplx>(s.coeffs.size())};
  const auto& k = axis == 0 ? t.kx : t.ky;
  const auto& nyq = axis == 0 ? t.nyq_x : t.nyq_y;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    d.coeffs[i] = nyq[i] ? cplx(0.0) : cplx(0.0, k[i]) * s.coeffs[i];
  return d;
}

// Discrete mollifier multiplier for (grid, eps), normalized to 1 at k = 0.
std::vector<double> build_mollifier(const Grid& g, double eps) {
  const auto& t = wavevectors(g);
  const double kmax_alias = kPi / g.dx();  // half the sampling wavenumber
  std::vector<double> mult(g.spectral_size());
  if (eps * kmax_alias >= 30.0) {
    // Aliased images of jhat are below 1e-12 here, so the band-limited multiplier
    // is the exact transform of the sampled periodized kernel.
    for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = mollifier_transform(eps * std::sqrt(t.k2[i]));
  } else {
    // Narrow kernel: sample J_eps with two layers of periodic images; positive samples
    // keep the discrete convolution order preserving.
    const int R = 2;
    const double L = g.L;
    const auto x = axis_points(g);
    auto Jeps = [&](double r2) {
      return std::pow(1.0 + r2 / (eps * eps), -0.5 * (g.n + 2)) / std::pow(eps, g.n);
    };
    Field ker(g);
    auto wrap = [L](double d) { return d >= 0.5 * L ? d - L : d; };
    for (std::size_t i = 0; i < g.N; ++i) {
      const double di = wrap(x[i]);
      if (g.n == 1) {
        double acc = 0.0;
        for (int a = -R; a <= R; ++a) {
          const double d = di + a * L;
          acc += Jeps(d * d);
        }
        ker.values[i] = acc;
      } else {
        for (std::size_t j = 0; j < g.N; ++j) {
          const double dj = wrap(x[j]);
          double acc = 0.0;
          for (int a = -R; a <= R; ++a)
            for (int b = -R; b <= R; ++b) {
              const double d1 = di + a * L;
              const double d2 = dj + b * L;
              acc += Jeps(d1 * d1 + d2 * d2);
            }
          ker.values[i * g.N + j] = acc;
        }
      }
    }
    const Spectrum ks = forward(ker);
    const double c0 = ks.coeffs[0].real();
    for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = ks.coeffs[i].real() / c0;
  }
  mult[0] = 1.0;
  return mult;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}
void put_f64(std::vector<std::uint8_t>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& b, std::size_t offset) : pos_(offset), bytes_(b) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * b);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * b);
    return std::bit_cast<double>(v);
  }
  void need(std::size_t k) const {
    if (pos_ + k > bytes_.size()) throw FormatError("snapshot: truncated at byte " + std::to_string(pos_));
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::size_t pos_;
  const std::vector<std::uint8_t>& bytes_;
};

}  // namespace

std::size_t Grid::size() const { return n == 1 ? N : N * N; }
std::size_t Grid::spectral_size() const { return n == 1 ? N / 2 + 1 : N * (N / 2 + 1); }
double Grid::cell_volume() const { return std::pow(dx(), n); }
double Grid::volume() const { return std::pow(L, n); }

void validate(const Grid& g) {
  if (g.n != 1 && g.n != 2) throw DomainError("grid: dimension must be 1 or 2, got " + std::to_string(g.n));
  if (g.N < 8 || !std::has_single_bit(g.N))
    throw DomainError("grid: points per axis must be a power of two >= 8, got " + std::to_string(g.N));
  if (!(g.L > 0.0) || !std::isfinite(g.L)) throw DomainError("grid: L must be positive");
}

Field::Field(const Grid& g, double fill) : grid(g), values(g.size(), fill) {}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw UsageError("field: value count does not match grid");
}

const Wavevectors& wavevectors(const Grid& g) { return workspace(g).tables(); }

Spectrum forward(const Field& u) { return workspace(u.grid).forward(u); }

Field inverse(const Spectrum& s) {
  if (s.coeffs.size() != s.grid.spectral_size()) throw UsageError("spectrum: coefficient count does not match grid");
  return workspace(s.grid).inverse(s);
}

std::vector<double> axis_points(const Grid& g) {
  std::vector<double> x(g.N);
  for (std::size_t i = 0; i < g.N; ++i) x[i] = g.dx() * static_cast<double>(i);
  return x;
}

Spectrum fractional_laplacian(const Spectrum& s, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw DomainError("fractional_laplacian: alpha must lie in (0, 2], got " + std::to_string(alpha));
  const auto& t = wavevectors(s.grid);
  Spectrum out = s;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= std::pow(t.k2[i], 0.5 * alpha);
  return out;
}

Field fractional_laplacian(const Field& u, double alpha) { return inverse(fractional_laplacian(forward(u), alpha)); }

VectorField solve_chemoattractant(const Field& u) {
  Spectrum v = forward(u);
  const auto& t = wavevectors(u.grid);
  v.coeffs[0] = 0.0;
  for (std::size_t i = 1; i < v.coeffs.size(); ++i) v.coeffs[i] /= t.k2[i];
  VectorField g;
  for (int axis = 0; axis < u.grid.n; ++axis) g.push_back(inverse(derivative(v, axis)));
  return g;
}

double mollifier_transform(double xi) {
  xi = std::fabs(xi);
  if (xi == 0.0) return 1.0;
  if (xi > 700.0) return 0.0;
  return xi * std::cyl_bessel_k(1.0, xi);
}

Field mollify(const Field& u, double eps) {
  if (!(eps > 0.0) || eps > u.grid.L / 8.0)
    throw DomainError("mollify: eps must lie in (0, L/8], got " + std::to_string(eps));
  using Key = std::pair<GridKey, std::uint64_t>;
  thread_local std::map<Key, std::vector<double>> cache;
  auto& mult = cache[{key_of(u.grid), std::bit_cast<std::uint64_t>(eps)}];
  if (mult.empty()) mult = build_mollifier(u.grid, eps);
  Spectrum s = forward(u);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] *= mult[i];
  return inverse(s);
}

void truncate(Spectrum& s) {
  const auto& t = wavevectors(s.grid);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    if (!t.keep[i]) s.coeffs[i] = 0.0;
}

Field dealiased_product(const Field& u, const Field& w) {
  require_same_grid(u.grid, w.grid, "dealiased_product");
  Spectrum su = forward(u);
  Spectrum sw = forward(w);
  truncate(su);
  truncate(sw);
  const Field a = inverse(su);
  const Field b = inverse(sw);
  Field p(u.grid);
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = a.values[i] * b.values[i];
  Spectrum sp = forward(p);
  truncate(sp);
  return inverse(sp);
}

Field chemotaxis_divergence(const Field& u, const VectorField& gradv) {
  if (static_cast<int>(gradv.size()) != u.grid.n) throw UsageError("chemotaxis_divergence: gradient has wrong rank");
  Spectrum total{u.grid, std::vector<cplx>(u.grid.spectral_size())};
  for (int axis = 0; axis < u.grid.n; ++axis) {
    require_same_grid(u.grid, gradv[axis].grid, "chemotaxis_divergence");
    const Spectrum flux = forward(dealiased_product(u, gradv[axis]));
    const Spectrum d = derivative(flux, axis);
    for (std::size_t i = 0; i < total.coeffs.size(); ++i) total.coeffs[i] += d.coeffs[i];
  }
  total.coeffs[0] = 0.0;
  return inverse(total);
}

double lp_norm(const Field& u, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1, got " + std::to_string(p));
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::fabs(v));
    return m;
  }
  // Scale by the max to keep |u|^p in range for large p.
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::fabs(v));
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : u.values) acc += std::pow(std::fabs(v) / m, p);
  return m * std::pow(acc * u.grid.cell_volume(), 1.0 / p);
}

double lp_norm_normalized(const Field& u, double p) {
  const double norm = lp_norm(u, p);
  return std::isinf(p) ? norm : norm / std::pow(u.grid.volume(), 1.0 / p);
}

double sobolev_seminorm(const Field& u, double s) {
  if (!(s > 0.0 && s <= 2.0)) throw DomainError("sobolev_seminorm: s must lie in (0, 2], got " + std::to_string(s));
  const Spectrum c = forward(u);
  const auto& t = wavevectors(u.grid);
  double acc = 0.0;
  for (std::size_t i = 1; i < c.coeffs.size(); ++i) acc += t.weight[i] * std::pow(t.k2[i], s) * std::norm(c.coeffs[i]);
  return std::sqrt(acc * u.grid.volume());
}

double integral(const Field& u) {
  double acc = 0.0;
  for (double v : u.values) acc += v;
  return acc * u.grid.cell_volume();
}

double mean(const Field& u) { return integral(u) / u.grid.volume(); }

double inner(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid, "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * g.values[i];
  return acc * f.grid.cell_volume();
}

double min_value(const Field& u) { return *std::min_element(u.values.begin(), u.values.end()); }
double max_value(const Field& u) { return *std::max_element(u.values.begin(), u.values.end()); }

double singular_integral_constant(double alpha, int n) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("singular_integral_constant: alpha must lie in (0, 2)");
  if (n < 1) throw DomainError("singular_integral_constant: n must be positive");
  return alpha * std::pow(2.0, alpha - 1.0) * specfun::gamma_function(0.5 * (n + alpha)) /
         (std::pow(kPi, 0.5 * n) * specfun::gamma_function(1.0 - 0.5 * alpha));
}

std::vector<std::uint8_t> encode_snapshot(const Field& u, double t) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + 8 * u.values.size());
  for (char c : {'F', 'K', 'S', '1'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, static_cast<std::uint32_t>(u.grid.n));
  for (int a = 0; a < u.grid.n; ++a) put_u32(out, static_cast<std::uint32_t>(u.grid.N));
  put_f64(out, u.grid.L);
  put_f64(out, t);
  for (double v : u.values) put_f64(out, v);
  return out;
}

void write_snapshot(const std::string& path, const Field& u, double t) {
  const auto bytes = encode_snapshot(u, t);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("snapshot: cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw FormatError("snapshot: write failed for " + path);
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "FKS1", 4) != 0) throw FormatError("snapshot: bad magic");
  Reader r(bytes, 4);
  const std::uint32_t n = r.u32();
  if (n != 1 && n != 2) throw FormatError("snapshot: dimension " + std::to_string(n) + " unsupported");
  std::vector<std::uint32_t> sizes;
  for (std::uint32_t a = 0; a < n; ++a) sizes.push_back(r.u32());
  if (n == 2 && sizes[0] != sizes[1]) throw FormatError("snapshot: unequal axis sizes");
  Grid g{static_cast<int>(n), sizes[0], r.f64()};
  try {
    validate(g);
  } catch (const DomainError& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
  const double t = r.f64();
  if (r.remaining() != 8 * g.size())
    throw FormatError("snapshot: expected " + std::to_string(8 * g.size()) + " value bytes, found " +
                      std::to_string(r.remaining()));
  Field u(g);
  for (double& v : u.values) v = r.f64();
  return {std::move(u), t};
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("snapshot: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace fraks::spectral
