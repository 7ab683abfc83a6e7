#include "elab/hnls.hpp"

#include <algorithm>
#include <cmath>

namespace elab::hnls {

WaveFunction wkb_initial_data(const Field& rho_in, const Field& S, const PhysicalScales& scales) {
  require_same_box(rho_in.box(), S.box(), "wkb_initial_data");
  for (const auto& v : rho_in.values())
    if (v.real() < 0.0) throw ValidationError("initial density must be nonnegative", "scene.rho");
  const double mass = grid::integrate_re(rho_in);
  if (std::abs(mass - 1.0) > 1e-8) throw ValidationError("initial density must have unit mass", "scene.rho");
  Field psi(rho_in.box());
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = std::sqrt(rho_in[i].real()) * std::polar(1.0, S[i].real() / scales.hbar);
  return WaveFunction{std::move(psi), scales};
}

Solver::Solver(const Field& v_n, double hbar, double dt)
    : box_(v_n.box()), hbar_(hbar), dt_(dt), v_hat_(grid::spectrum(v_n)), half_phase_(v_n.size()) {
  if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive", "solver.dt");
  for (std::size_t i = 0; i < half_phase_.size(); ++i) {
    const auto idx = box_.unflatten(i);
    double k2 = 0.0;
    for (int a = 0; a < box_.d; ++a) {
      const double k = box_.wavenumber(idx[static_cast<std::size_t>(a)]);
      k2 += k * k;
    }
    half_phase_[i] = std::polar(1.0, -hbar * k2 * dt / 4.0);
  }
}

void Solver::kinetic_half(Field& psi) const {
  auto ph = grid::spectrum(psi);
  for (std::size_t i = 0; i < ph.size(); ++i) ph[i] *= half_phase_[i];
  psi = grid::from_spectrum(box_, std::move(ph));
}

void Solver::step(Field& psi) {
  require_same_box(box_, psi.box(), "hnls::Solver::step");
  kinetic_half(psi);
  const auto mean_field = grid::convolve_with_spectrum(v_hat_, psi.abs2());
  double vmax = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double u = mean_field[i].real();
    vmax = std::max(vmax, std::abs(u));
    psi[i] *= std::polar(1.0, -u * dt_ / hbar_);
  }
  last_budget_ = vmax > 0.0 ? 0.5 * hbar_ / vmax : INFINITY;
  if (dt_ > last_budget_) ++warnings_;
  kinetic_half(psi);
}

WaveFunction hnls_step(const WaveFunction& phi, const Field& v_n, double dt) {
  Solver solver(v_n, phi.scales.hbar, dt);
  WaveFunction out = phi;
  solver.step(out.psi);
  return out;
}

Energy hnls_energy(const WaveFunction& phi, const Field& v_n) {
  const auto grad = grid::gradient(phi.psi);
  double kin = 0.0;
  for (int a = 0; a < grad.dim(); ++a) kin += std::pow(grid::l2_norm(grad[a]), 2);
  const auto rho = phi.psi.abs2();
  const auto conv = grid::periodic_convolution(v_n, rho);
  const double h2 = phi.scales.hbar * phi.scales.hbar;
  return Energy{0.5 * h2 * kin, 0.5 * grid::inner_re(conv, rho)};
}

QuantumDensities densities(const WaveFunction& phi) {
  QuantumDensities out;
  out.rho = phi.psi.abs2();
  const auto grad = grid::gradient(phi.psi);
  std::vector<Field> comps;
  for (int a = 0; a < grad.dim(); ++a) {
    Field j(phi.psi.box());
    for (std::size_t i = 0; i < j.size(); ++i) j[i] = phi.scales.hbar * (std::conj(phi.psi[i]) * grad[a][i]).imag();
    comps.push_back(std::move(j));
  }
  out.J = VectorField(std::move(comps));
  return out;
}

namespace {

VectorField current(const Field& psi, double hbar) {
  PhysicalScales s;
  s.hbar = hbar;
  s.d = psi.box().d;
  return densities(WaveFunction{psi, s}).J;
}

}  // namespace

double continuity_residual(const Field& prev, const Field& mid, const Field& next, double dt, double hbar) {
  auto r = (next.abs2() - prev.abs2()) * cplx(1.0 / (2.0 * dt));
  r += grid::divergence(current(mid, hbar));
  return grid::l2_norm(r.real_part());
}

double momentum_residual(const Field& prev, const Field& mid, const Field& next, double dt, const Field& v_n,
                         double hbar) {
  const auto& box = mid.box();
  const int d = box.d;
  const double h2 = hbar * hbar;
  const auto jp = current(prev, hbar);
  const auto jn = current(next, hbar);
  const auto grad = grid::gradient(mid);
  const auto rho = mid.abs2();
  const auto grad_mf = grid::gradient(grid::periodic_convolution(v_n, rho));
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    Field r = (jn[j] - jp[j]) * cplx(1.0 / (2.0 * dt));
    for (int k = 0; k < d; ++k) {
      Field flux(box);
      for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = h2 * (std::conj(grad[j][i]) * grad[k][i]).real();
      flux -= grid::spectral_derivative(grid::spectral_derivative(rho, j), k) * cplx(h2 / 4.0);
      r += grid::spectral_derivative(flux, k);
    }
    r += grad_mf[j].real_part() * rho;
    total += std::pow(grid::l2_norm(r.real_part()), 2);
  }
  return std::sqrt(total);
}

void evolve(WaveFunction& phi, const Field& v_n, double dt, int steps, int every,
            const std::function<void(int, const WaveFunction&)>& on_snapshot) {
  if (every < 1) throw ValidationError("snapshot cadence must be >= 1", "solver.every");
  Solver solver(v_n, phi.scales.hbar, dt);
  for (int s = 0; s <= steps; ++s) {
    if (on_snapshot && (s % every == 0 || s == steps)) on_snapshot(s, phi);
    if (s < steps) solver.step(phi.psi);
  }
}

}  // namespace elab::hnls
