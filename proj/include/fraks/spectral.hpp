#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fraks::spectral {

using cplx = std::complex<double>;

// Periodic box [0, L)^n sampled with N points per axis, n in {1, 2}.
struct Grid {
  int n = 1;
  std::size_t N = 64;
  double L = 6.283185307179586;

  std::size_t size() const;           // N^n physical samples
  std::size_t spectral_size() const;  // r2c half spectrum
  double dx() const { return L / static_cast<double>(N); }
  double cell_volume() const;  // dx^n
  double volume() const;       // L^n
  // Largest retained index under the 2/3 rule.
  std::size_t dealias_cutoff() const { return (N - 1) / 3; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

// Throws DomainError unless n in {1,2}, N a power of two >= 8 and L > 0.
void validate(const Grid& g);

struct Field {
  Grid grid;
  std::vector<double> values;  // row-major, values[i * N + j] = u(x_i, y_j)

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0);
  Field(const Grid& g, std::vector<double> v);
};

// Components of a gradient; size() == grid.n.
using VectorField = std::vector<Field>;

// Normalized coefficients: u(x) = sum_k c_k exp(i k.x), stored in the r2c layout
// (last axis holds m = 0..N/2).
struct Spectrum {
  Grid grid;
  std::vector<cplx> coeffs;
};

// Per-grid tables indexed like Spectrum::coeffs.
struct Wavevectors {
  std::vector<double> kx, ky;  // ky == 0 for n = 1
  std::vector<double> k2;      // |k|^2
  std::vector<double> weight;  // multiplicity of the mode in the full spectrum
  std::vector<bool> keep;      // inside the 2/3 band
  std::vector<bool> nyq_x, nyq_y;
};

const Wavevectors& wavevectors(const Grid& g);

Spectrum forward(const Field& u);
Field inverse(const Spectrum& s);

// Grid sample points along one axis.
std::vector<double> axis_points(const Grid& g);
// Field filled from f(x) (n = 1) or f(x, y) (n = 2).
template <class F>
Field sample(const Grid& g, F&& f) {
  Field u(g);
  const auto x = axis_points(g);
  if (g.n == 1) {
    for (std::size_t i = 0; i < g.N; ++i) u.values[i] = f(x[i], 0.0);
  } else {
    for (std::size_t i = 0; i < g.N; ++i)
      for (std::size_t j = 0; j < g.N; ++j) u.values[i * g.N + j] = f(x[i], x[j]);
  }
  return u;
}

// (-Delta)^(alpha/2) as the multiplier |k|^alpha, alpha in (0, 2].
Field fractional_laplacian(const Field& u, double alpha);
Spectrum fractional_laplacian(const Spectrum& s, double alpha);

// grad v for -Delta v = u - mean(u), mean(v) = 0.
VectorField solve_chemoattractant(const Field& u);

// J_eps * u with J(x) = c_n (1 + |x|^2)^(-(n+2)/2), 0 < eps <= L/8.
Field mollify(const Field& u, double eps);
// Normalized transform of J: jhat(xi) = |xi| K_1(|xi|), jhat(0) = 1.
double mollifier_transform(double xi);

// div(u grad v) with 2/3-rule dealiasing of the product.
Field chemotaxis_divergence(const Field& u, const VectorField& gradv);

// Dealiased pointwise product u * w.
Field dealiased_product(const Field& u, const Field& w);

// Zero the modes outside the 2/3 band.
void truncate(Spectrum& s);

// (sum |u|^p dx^n)^(1/p); p = infinity gives max |u|.
double lp_norm(const Field& u, double p);
// Same norm for the probability measure dx^n / L^n.
double lp_norm_normalized(const Field& u, double p);
// ||(-Delta)^(s/2) u||_2 with the Parseval scaling of lp_norm.
double sobolev_seminorm(const Field& u, double s);
double integral(const Field& u);
double mean(const Field& u);
double inner(const Field& f, const Field& g);
double min_value(const Field& u);
double max_value(const Field& u);

// Normalizing constant of the singular-integral form
// (-Delta)^(alpha/2) u(x) = C p.v. int (u(x) - u(y)) / |x - y|^(n + alpha) dy.
double singular_integral_constant(double alpha, int n);

// Snapshot file: "FKS1", u32 n, u32 sizes[n], f64 L, f64 t, f64 values; little-endian.
struct Snapshot {
  Field field;
  double t = 0.0;
};
void write_snapshot(const std::string& path, const Field& u, double t);
std::vector<std::uint8_t> encode_snapshot(const Field& u, double t);
Snapshot read_snapshot(const std::string& path);
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

}  // namespace fraks::spectral
