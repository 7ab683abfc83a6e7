#pragma once

// Periodic-box discretization and spectral calculus.
//
// Grid points along each axis sit at x_i = (i - n/2) h with h = L/n, so the
// box is [-L/2, L/2) and index n/2 is the origin. Storage is axis-major:
// axis 0 is the slowest index, i.e. flat = (i0 * n + i1) * n + i2.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "elab/error.hpp"

namespace elab {

using cplx = std::complex<double>;
using Point = std::array<double, 3>;

struct BoxSpec {
  int d = 1;
  double L = 1.0;
  int n = 8;

  /// Validating constructor: d in {1,2,3}, L > 0, n a power of two >= 8.
  static BoxSpec make(int d, double L, int n);

  double spacing() const noexcept { return L / n; }
  double cell_volume() const noexcept;
  std::size_t size() const noexcept;
  double coord(int i) const noexcept { return (i - n / 2) * spacing(); }
  /// Angular wavenumber of FFT bin i (Nyquist bin reported as -pi/h).
  double wavenumber(int i) const noexcept;
  std::array<int, 3> unflatten(std::size_t flat) const noexcept;
  Point point(std::size_t flat) const noexcept;
  /// Index of -x under the reflection x -> -x (per axis i -> (n - i) mod n).
  std::size_t reflect(std::size_t flat) const noexcept;

  bool operator==(const BoxSpec&) const = default;
};

void require_same_box(const BoxSpec& a, const BoxSpec& b, const char* where);

class Field {
 public:
  Field() = default;
  explicit Field(const BoxSpec& box, cplx fill = 0.0);
  Field(const BoxSpec& box, std::vector<cplx> values);

  static Field from_function(const BoxSpec& box, const std::function<cplx(const Point&)>& f);
  static Field constant(const BoxSpec& box, cplx c) { return Field(box, c); }

  const BoxSpec& box() const noexcept { return box_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::vector<cplx>& storage() noexcept { return values_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(const Field& o);  // pointwise
  Field& operator*=(cplx s);

  Field real_part() const;
  Field abs2() const;
  Field conj() const;
  /// max|Im| / (L2 norm of the field), 0 for the zero field.
  double imag_ratio() const;
  double max_abs() const;
  double min_real() const;
  double max_real() const;

 private:
  BoxSpec box_;
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, const Field& b);
Field operator*(Field a, cplx s);
Field operator*(cplx s, Field a);

struct VectorField {
  std::vector<Field> components;

  VectorField() = default;
  explicit VectorField(const BoxSpec& box);  // d zero components
  explicit VectorField(std::vector<Field> comps);

  const BoxSpec& box() const { return components.at(0).box(); }
  int dim() const noexcept { return static_cast<int>(components.size()); }
  Field& operator[](int j) { return components[static_cast<std::size_t>(j)]; }
  const Field& operator[](int j) const { return components[static_cast<std::size_t>(j)]; }
};

namespace grid {

Field spectral_derivative(const Field& f, int axis);
VectorField gradient(const Field& f);
Field divergence(const VectorField& v);
Field laplacian(const Field& f);

/// (f*g)(x) = sum_y f(x-y) g(y) h^d, via FFT.
Field periodic_convolution(const Field& f, const Field& g);
/// Same, with the transform of f precomputed by `spectrum(f)`.
Field convolve_with_spectrum(std::span<const cplx> f_hat, const Field& g);

std::vector<cplx> spectrum(const Field& f);
Field from_spectrum(const BoxSpec& box, std::vector<cplx> f_hat);

cplx integrate(const Field& f);
double integrate_re(const Field& f);
double inner_re(const Field& f, const Field& g);  // Re int conj(f) g

double l2_norm(const Field& f);
double lp_norm(const Field& f, double p);
double linf_norm(const Field& f);
/// L2 norm evaluated from the spectrum (Plancherel).
double spectral_l2_norm(const Field& f);
/// ||<hbar grad> f||_{L2} = (sum (1 + hbar^2 |xi|^2) |f^(xi)|^2)^{1/2}.
double weighted_sobolev_norm(const Field& f, double hbar);

/// Zero every Fourier mode with |k_axis| > fraction * (n/2) on some axis.
Field dealias(const Field& f, double fraction = 2.0 / 3.0);
/// Trigonometric-interpolation resampling onto another box with the same
/// d and L (zero padding or truncation in Fourier space).
Field resample(const Field& f, const BoxSpec& target);
/// max|f| over grid points lying on the outer shell of the box.
double boundary_shell_max(const Field& f);

}  // namespace grid
}  // namespace elab
