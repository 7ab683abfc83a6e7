#include <algorithm>
#include <cmath>
#include <random>

#include "elab/fft.hpp"
#include "elab/hierarchy.hpp"
#include "elab/pool.hpp"
#include "elab/rate_fit.hpp"

namespace elab::hierarchy {

namespace {

constexpr double kAlpha = 1.5;  // d + 1/2 at d = 1

std::vector<double> japanese_weights(const BoxSpec& box, double hbar) {
  std::vector<double> w(static_cast<std::size_t>(box.n));
  for (int i = 0; i < box.n; ++i) {
    const double xi = box.wavenumber(i);
    w[static_cast<std::size_t>(i)] = 1.0 + hbar * hbar * xi * xi;  // <hbar xi>^2
  }
  return w;
}

void check_probe_kernel(const DensityKernel& f, const Field& v) {
  if (f.k != 2) throw ValidationError("the collapsing probe takes order-2 kernels");
  require_same_box(f.box, v.box(), "collapsing_ratio");
}

}  // namespace

DensityKernel random_band_limited_kernel(const BoxSpec& box, int band, std::uint64_t seed) {
  if (band < 0 || 2 * band >= box.n) throw ValidationError("band must satisfy 0 <= 2 band < n", "band");
  DensityKernel f(box, 2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int n = box.n;
  auto in_band = [&](int i) { return std::min(i, n - i) <= band; };
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e, ++idx)
          if (in_band(a) && in_band(b) && in_band(c) && in_band(e)) {
            const double re = gauss(rng), im = gauss(rng);
            f.values[idx] = {re, im};
          }
  fft::inverse(f.values, fft::cube(n, 4));
  return f;
}

double collapsing_ratio(const DensityKernel& f, const Field& v, double hbar, const CollapsingProbeConfig& cfg) {
  check_probe_kernel(f, v);
  if (!(hbar > 0)) throw ValidationError("hbar must be positive", "hbar");
  if (!(cfg.T_probe > 0) || cfg.time_samples < 1) throw ValidationError("empty time window", "T_probe");
  const auto& box = f.box;
  const std::size_t n = static_cast<std::size_t>(box.n), size = f.values.size();
  const double h = box.spacing();
  const auto dims4 = fft::cube(box.n, 4), dims2 = fft::cube(box.n, 2);
  const auto w = japanese_weights(box, hbar);

  std::vector<cplx> fhat = f.values;
  fft::forward(fhat, dims4);
  double rhs2 = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    rhs2 += w[i / (n * n * n)] * w[(i / (n * n)) % n] * w[(i / n) % n] * w[i % n] * std::norm(fhat[i]);
    peak = std::max(peak, std::abs(fhat[i]));
  }
  if (peak == 0.0) return 0.0;
  rhs2 *= std::pow(h, 4) / static_cast<double>(size);

  // modes below round-off of the largest one do not move the norms
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < size; ++i)
    if (std::abs(fhat[i]) > 1e-15 * peak) support.push_back(i);

  const double dt = cfg.T_probe / cfg.time_samples;
  double lhs2 = 0.0;
  std::vector<cplx> a(n);
  DensityKernel g(box, 2);
  for (int s = 0; s < cfg.time_samples; ++s) {
    const double t = (s + 0.5) * dt;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = box.wavenumber(static_cast<int>(i));
      a[i] = std::polar(1.0, -t * hbar * xi * xi / 2);
    }
    std::fill(g.values.begin(), g.values.end(), cplx{});
    for (std::size_t i : support)
      g.values[i] = fhat[i] * a[i / (n * n * n)] * a[(i / (n * n)) % n] * std::conj(a[(i / n) % n] * a[i % n]);
    fft::inverse(g.values, dims4);
    auto b = collision_apply(g, v, 1, cfg.sign);
    fft::forward(b.values, dims2);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < b.values.size(); ++i) norm2 += w[i / n] * w[i % n] * std::norm(b.values[i]);
    norm2 *= h * h / static_cast<double>(n * n) / (hbar * hbar);  // B_hbar = B / hbar
    lhs2 += norm2 * dt;
  }
  const double v_l1 = grid::lp_norm(v, 1.0);
  if (v_l1 == 0.0) throw ValidationError("potential has zero L1 norm", "V");
  return std::sqrt(lhs2) * std::pow(hbar, kAlpha) / (v_l1 * std::sqrt(rhs2));
}

CollapsingProbeReport collapsing_probe(const Field& v, const std::vector<double>& hbar_grid, int samples,
                                       std::uint64_t seed, const CollapsingProbeConfig& cfg) {
  if (samples < 1) throw ValidationError("need at least one sample", "samples");
  if (hbar_grid.size() < 3) throw ValidationError("exponent fit needs at least three hbar values", "hbar_grid");
  const auto box = BoxSpec::make(1, cfg.L, cfg.n);
  require_same_box(box, v.box(), "collapsing_probe");

  CollapsingProbeReport rep;
  rep.alpha = kAlpha;
  rep.samples = samples;
  rep.seed = seed;
  rep.hbar_grid = hbar_grid;
  rep.ratios.assign(hbar_grid.size(), std::vector<double>(static_cast<std::size_t>(samples)));
  parallel_for(static_cast<std::size_t>(samples), cfg.threads, [&](std::size_t i) {
    const auto f = random_band_limited_kernel(box, cfg.band, seed + i);
    for (std::size_t q = 0; q < hbar_grid.size(); ++q) rep.ratios[q][i] = collapsing_ratio(f, v, hbar_grid[q], cfg);
  });

  std::vector<std::pair<double, double>> pts;
  for (std::size_t q = 0; q < hbar_grid.size(); ++q) {
    rep.max_ratio_per_hbar.push_back(*std::max_element(rep.ratios[q].begin(), rep.ratios[q].end()));
    pts.emplace_back(1.0 / hbar_grid[q], rep.max_ratio_per_hbar.back());
  }
  rep.fitted_exponent = fit_rate(pts).slope;
  return rep;
}

}  // namespace elab::hierarchy
