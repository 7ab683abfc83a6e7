#include <algorithm>
#include <cmath>

#include "elab/fft.hpp"
#include "elab/grid.hpp"

namespace elab::grid {

namespace {

std::vector<int> dims_of(const BoxSpec& box) { return fft::cube(box.n, box.d); }

// Wavenumber along `axis` for every flat spectral index.
std::vector<double> axis_wavenumbers(const BoxSpec& box, int axis, bool zero_nyquist) {
  std::vector<double> k(box.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const int m = box.unflatten(i)[static_cast<std::size_t>(axis)];
    k[i] = (zero_nyquist && m == box.n / 2) ? 0.0 : box.wavenumber(m);
  }
  return k;
}

double k_squared(const BoxSpec& box, std::size_t flat) {
  const auto idx = box.unflatten(flat);
  double s = 0.0;
  for (int a = 0; a < box.d; ++a) {
    const double k = box.wavenumber(idx[static_cast<std::size_t>(a)]);
    s += k * k;
  }
  return s;
}

}  // namespace

std::vector<cplx> spectrum(const Field& f) {
  std::vector<cplx> out(f.values().begin(), f.values().end());
  fft::forward(out, dims_of(f.box()));
  return out;
}

Field from_spectrum(const BoxSpec& box, std::vector<cplx> f_hat) {
  fft::inverse(f_hat, dims_of(box));
  return Field(box, std::move(f_hat));
}

Field spectral_derivative(const Field& f, int axis) {
  const auto& box = f.box();
  if (axis < 0 || axis >= box.d) throw ValidationError("derivative axis out of range");
  auto fh = spectrum(f);
  const auto k = axis_wavenumbers(box, axis, true);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= cplx(0.0, k[i]);
  return from_spectrum(box, std::move(fh));
}

VectorField gradient(const Field& f) {
  const auto& box = f.box();
  const auto fh = spectrum(f);
  std::vector<Field> comps;
  for (int a = 0; a < box.d; ++a) {
    auto g = fh;
    const auto k = axis_wavenumbers(box, a, true);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= cplx(0.0, k[i]);
    comps.push_back(from_spectrum(box, std::move(g)));
  }
  return VectorField(std::move(comps));
}

Field divergence(const VectorField& v) {
  const auto& box = v.box();
  std::vector<cplx> acc(box.size(), 0.0);
  for (int a = 0; a < v.dim(); ++a) {
    const auto fh = spectrum(v[a]);
    const auto k = axis_wavenumbers(box, a, true);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cplx(0.0, k[i]) * fh[i];
  }
  return from_spectrum(box, std::move(acc));
}

Field laplacian(const Field& f) {
  const auto& box = f.box();
  auto fh = spectrum(f);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= -k_squared(box, i);
  return from_spectrum(box, std::move(fh));
}

Field convolve_with_spectrum(std::span<const cplx> f_hat, const Field& g) {
  const auto& box = g.box();
  auto gh = spectrum(g);
  const double w = box.cell_volume();
  // The grid origin sits at index n/2, so the cyclic result is shifted by
  // n/2 per axis: a factor (-1)^m on each axis.
  for (std::size_t i = 0; i < gh.size(); ++i) {
    const auto idx = box.unflatten(i);
    int parity = 0;
    for (int a = 0; a < box.d; ++a) parity += idx[static_cast<std::size_t>(a)];
    gh[i] *= f_hat[i] * (parity % 2 == 0 ? w : -w);
  }
  return from_spectrum(box, std::move(gh));
}

Field periodic_convolution(const Field& f, const Field& g) {
  require_same_box(f.box(), g.box(), "periodic_convolution");
  const auto fh = spectrum(f);
  return convolve_with_spectrum(fh, g);
}

cplx integrate(const Field& f) {
  cplx s = 0.0;
  for (const auto& v : f.values()) s += v;
  return s * f.box().cell_volume();
}

double integrate_re(const Field& f) { return integrate(f).real(); }

double inner_re(const Field& f, const Field& g) {
  require_same_box(f.box(), g.box(), "inner_re");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (std::conj(f[i]) * g[i]).real();
  return s * f.box().cell_volume();
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(s * f.box().cell_volume());
}

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw ValidationError("Lp norm needs p >= 1");
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.box().cell_volume(), 1.0 / p);
}

double linf_norm(const Field& f) { return f.max_abs(); }

double spectral_l2_norm(const Field& f) {
  const auto fh = spectrum(f);
  double s = 0.0;
  for (const auto& v : fh) s += std::norm(v);
  return std::sqrt(s * f.box().cell_volume() / static_cast<double>(f.size()));
}

double weighted_sobolev_norm(const Field& f, double hbar) {
  if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
  const auto& box = f.box();
  const auto fh = spectrum(f);
  double s = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) s += (1.0 + hbar * hbar * k_squared(box, i)) * std::norm(fh[i]);
  return std::sqrt(s * box.cell_volume() / static_cast<double>(f.size()));
}

Field dealias(const Field& f, double fraction) {
  const auto& box = f.box();
  auto fh = spectrum(f);
  const double cutoff = fraction * (box.n / 2);
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const auto idx = box.unflatten(i);
    for (int a = 0; a < box.d; ++a) {
      const int m = idx[static_cast<std::size_t>(a)];
      const int km = m < box.n / 2 ? m : box.n - m;
      if (km > cutoff) {
        fh[i] = 0.0;
        break;
      }
    }
  }
  return from_spectrum(box, std::move(fh));
}

Field resample(const Field& f, const BoxSpec& target) {
  const auto& src = f.box();
  if (src.d != target.d || src.L != target.L)
    throw ValidationError("resample requires the same dimension and edge length");
  if (src.n == target.n) return f;
  const auto fh = spectrum(f);
  const int keep = std::min(src.n, target.n) / 2;  // modes |m| < keep survive
  const double scale = std::pow(static_cast<double>(target.n) / src.n, src.d);
  std::vector<cplx> out(target.size(), 0.0);
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const auto idx = src.unflatten(i);
    std::size_t t = 0;
    bool ok = true;
    for (int a = 0; a < src.d; ++a) {
      const int m = idx[static_cast<std::size_t>(a)];
      const int signed_m = m < src.n / 2 ? m : m - src.n;
      if (std::abs(signed_m) >= keep) {
        ok = false;
        break;
      }
      const int tm = signed_m >= 0 ? signed_m : signed_m + target.n;
      t = t * static_cast<std::size_t>(target.n) + static_cast<std::size_t>(tm);
    }
    if (ok) out[t] = fh[i] * scale;
  }
  return from_spectrum(target, std::move(out));
}

double boundary_shell_max(const Field& f) {
  const auto& box = f.box();
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = box.unflatten(i);
    bool shell = false;
    for (int a = 0; a < box.d; ++a) {
      const int j = idx[static_cast<std::size_t>(a)];
      shell = shell || j == 0 || j == box.n - 1;
    }
    if (shell) m = std::max(m, std::abs(f[i]));
  }
  return m;
}

}  // namespace elab::grid
