#include "elab/modulated.hpp"

#include <algorithm>
#include <cmath>

namespace elab::modulated {

namespace {

// w_k = (hbar d_k - i u^k) phi
std::vector<Field> modulated_gradient(const Field& phi, const euler::FluidState& s, double hbar) {
  const auto grad = grid::gradient(phi);
  std::vector<Field> w;
  for (int k = 0; k < grad.dim(); ++k) {
    Field wk(phi.box());
    for (std::size_t i = 0; i < wk.size(); ++i) wk[i] = hbar * grad[k][i] - cplx(0.0, s.u[k][i].real()) * phi[i];
    w.push_back(std::move(wk));
  }
  return w;
}

Field div_u(const euler::FluidState& s) { return grid::divergence(s.u).real_part(); }

void check_boxes(const Field& phi, const euler::FluidState& s, const Field& v_n, const char* where) {
  require_same_box(phi.box(), s.rho.box(), where);
  require_same_box(phi.box(), v_n.box(), where);
  if (s.u.dim() != phi.box().d) throw ValidationError(std::string(where) + ": velocity dimension mismatch");
}

}  // namespace

ModulatedEnergyBreakdown modulated_energy(const Field& phi, const euler::FluidState& state, const Field& v_n,
                                          double b0, double hbar) {
  check_boxes(phi, state, v_n, "modulated_energy");
  ModulatedEnergyBreakdown m;
  for (const auto& wk : modulated_gradient(phi, state, hbar)) m.kinetic_mod += 0.5 * std::pow(grid::l2_norm(wk), 2);
  const auto rho_n = phi.abs2();
  const auto rho = state.rho.real_part();
  m.interaction = 0.5 * grid::inner_re(grid::periodic_convolution(v_n, rho_n), rho_n);
  m.euler_sq = 0.5 * b0 * grid::inner_re(rho, rho);
  m.cross = -b0 * grid::inner_re(rho, rho_n);
  m.total = m.kinetic_mod + m.interaction + m.euler_sq + m.cross;
  return m;
}

double modulated_energy_direct(const Field& phi, const euler::FluidState& state, const Field& v_n, double b0,
                               double hbar) {
  check_boxes(phi, state, v_n, "modulated_energy_direct");
  const auto& box = phi.box();
  const auto grad = grid::gradient(phi);
  const auto rho_n = phi.abs2();
  const auto mf = grid::periodic_convolution(v_n, rho_n);
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double rn = std::norm(phi[i]);
    const double r = state.rho[i].real();
    double e = 0.0;
    for (int k = 0; k < box.d; ++k) {
      const double u = state.u[k][i].real();
      const double j = hbar * (std::conj(phi[i]) * grad[k][i]).imag();
      e += hbar * hbar * std::norm(grad[k][i]) - 2.0 * u * j + u * u * rn;
    }
    e += rn * mf[i].real() + b0 * r * r - 2.0 * b0 * r * rn;
    sum += 0.5 * e;
  }
  return sum * box.cell_volume();
}

ErrorTerm error_term(const Field& phi, const euler::FluidState& state, const Field& v_n, double b0,
                     const PhysicalScales& scales) {
  check_boxes(phi, state, v_n, "error_term");
  const auto rho_n = phi.abs2();
  const auto grad_mf = grid::gradient(grid::periodic_convolution(v_n, rho_n));
  ErrorTerm e;
  for (int j = 0; j < grad_mf.dim(); ++j) e.transport += grid::inner_re(state.u[j], grad_mf[j].real_part() * rho_n);
  e.pressure = 0.5 * b0 * grid::inner_re(div_u(state), rho_n * rho_n);
  e.value = e.transport + e.pressure;
  e.budget = scales.mean_field_budget();
  return e;
}

RhsTerms evolution_rhs(const Field& phi, const euler::FluidState& state, const Field& v_n, double b0, double hbar) {
  check_boxes(phi, state, v_n, "evolution_rhs");
  const int d = phi.box().d;
  RhsTerms r;
  const auto w = modulated_gradient(phi, state, hbar);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      const auto dku = grid::spectral_derivative(state.u[j], k);
      Field prod(phi.box());
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = dku[i].real() * (w[k][i] * std::conj(w[j][i])).real();
      r.strain -= grid::integrate_re(prod);
    }
  const auto rho_n = phi.abs2();
  const auto dv = div_u(state);
  const auto gap = rho_n - state.rho.real_part();
  r.div = -0.5 * b0 * grid::inner_re(dv, gap * gap);
  r.hbar_term = 0.25 * hbar * hbar * grid::inner_re(rho_n, grid::laplacian(dv).real_part());
  PhysicalScales s;
  s.hbar = hbar;
  r.err = error_term(phi, state, v_n, b0, s).value;
  return r;
}

double lap_div_u_sup(const euler::FluidState& state) { return grid::laplacian(div_u(state)).max_abs(); }

EvolutionAudit evolution_audit(const std::vector<CoupledSnapshot>& traj, const Field& v_n, double b0, double hbar,
                               DropTerm drop) {
  if (traj.size() < 3) throw ValidationError("evolution audit needs at least three snapshots");
  const double dt = traj[1].t - traj[0].t;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (std::abs(traj[i].fluid.t - traj[i].t) > 1e-9 * std::max(1.0, std::abs(traj[i].t)))
      throw ValidationError("clock mismatch between H-NLS and Euler snapshots");
    if (i > 0 && std::abs(traj[i].t - traj[i - 1].t - dt) > 1e-9 * dt)
      throw ValidationError("snapshot cadence is not uniform");
  }
  std::vector<double> M;
  for (const auto& s : traj) M.push_back(modulated_energy(s.phi, s.fluid, v_n, b0, hbar).total);
  EvolutionAudit audit;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    AuditRow row;
    row.t = traj[i].t;
    row.lhs = (M[i + 1] - M[i - 1]) / (2.0 * dt);
    row.rhs = evolution_rhs(traj[i].phi, traj[i].fluid, v_n, b0, hbar);
    switch (drop) {
      case DropTerm::None: break;
      case DropTerm::Strain: row.rhs.strain = 0.0; break;
      case DropTerm::Div: row.rhs.div = 0.0; break;
      case DropTerm::Hbar: row.rhs.hbar_term = 0.0; break;
      case DropTerm::Err: row.rhs.err = 0.0; break;
    }
    row.residual = row.lhs - row.rhs.sum();
    audit.max_residual = std::max(audit.max_residual, std::abs(row.residual));
    const double terms[4] = {row.rhs.strain, row.rhs.div, row.rhs.hbar_term, row.rhs.err};
    for (int k = 0; k < 4; ++k) audit.max_abs_term[k] = std::max(audit.max_abs_term[k], std::abs(terms[k]));
    audit.rows.push_back(row);
  }
  return audit;
}

}  // namespace elab::modulated
