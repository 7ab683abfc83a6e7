#pragma once

// Modulated energy between an H-NLS state and an Euler state:
//   M = 1/2 int |(hbar grad - i u) phi|^2 + 1/2 <V_N * rho_N, rho_N>
//       + (b0/2) int rho^2 - b0 int rho rho_N.
// M vanishes to leading order when phi is the WKB lift of (rho, u).

#include <vector>

#include "elab/euler.hpp"
#include "elab/grid.hpp"
#include "elab/potentials.hpp"

namespace elab::modulated {

struct ModulatedEnergyBreakdown {
  double kinetic_mod = 0.0;
  double interaction = 0.0;
  double euler_sq = 0.0;
  double cross = 0.0;
  double total = 0.0;
};

ModulatedEnergyBreakdown modulated_energy(const Field& phi, const euler::FluidState& state, const Field& v_n,
                                          double b0, double hbar);

/// Same functional as one pointwise integrand, with the kinetic part expanded
/// as hbar^2 |grad phi|^2 - 2 u.J + |u|^2 rho_N. Used to cross-check the
/// breakdown.
double modulated_energy_direct(const Field& phi, const euler::FluidState& state, const Field& v_n, double b0,
                               double hbar);

struct ErrorTerm {
  double transport = 0.0;  // int u^j d_j(V_N * rho_N) rho_N
  double pressure = 0.0;   // (b0/2) int div u rho_N^2
  double value = 0.0;
  double budget = 0.0;     // 1 / (hbar^4 N^beta)
};

ErrorTerm error_term(const Field& phi, const euler::FluidState& state, const Field& v_n, double b0,
                     const PhysicalScales& scales);

/// Right-hand side of dM/dt.
struct RhsTerms {
  double strain = 0.0;     // -int d_k u^j Re(w_k conj(w_j)),  w = (hbar grad - i u) phi
  double div = 0.0;        // -(b0/2) int div u (rho_N - rho)^2
  double hbar_term = 0.0;  // +(hbar^2/4) int rho_N Lap div u
  double err = 0.0;        // Er
  double sum() const noexcept { return strain + div + hbar_term + err; }
};

RhsTerms evolution_rhs(const Field& phi, const euler::FluidState& state, const Field& v_n, double b0, double hbar);

/// ||Lap div u||_{L^inf}, the regularity the lower bound consumes.
double lap_div_u_sup(const euler::FluidState& state);

struct CoupledSnapshot {
  double t = 0.0;
  Field phi;
  euler::FluidState fluid;  // sampled on phi's grid
};

enum class DropTerm { None, Strain, Div, Hbar, Err };

struct AuditRow {
  double t = 0.0;
  double lhs = 0.0;  // centred difference of M
  RhsTerms rhs;
  double residual = 0.0;
};

struct EvolutionAudit {
  std::vector<AuditRow> rows;  // interior snapshots only
  double max_residual = 0.0;
  double max_abs_term[4] = {0, 0, 0, 0};  // strain, div, hbar, err
};

/// Residual of the evolution identity at every interior snapshot. `drop`
/// removes one right-hand-side term (mutation testing). Throws ValidationError
/// when the phi and fluid clocks disagree or the cadence is not uniform.
EvolutionAudit evolution_audit(const std::vector<CoupledSnapshot>& traj, const Field& v_n, double b0, double hbar,
                               DropTerm drop = DropTerm::None);

struct GronwallReport {
  double cstar = 0.0;
  double budget = 0.0;  // a = 1 / (hbar^4 N^beta)
  bool lower_bound_holds = false;  // M + C* a >= 0 at every sample
  bool certified = false;          // both inequalities hold at C*
};

/// Smallest C >= 0 with M(t) + C a >= 0 and
/// log[(M(t) + C a + C hbar^2 t) / (M(0) + C a)] <= C t for every sample.
GronwallReport gronwall_certificate(const std::vector<double>& t, const std::vector<double>& M, double hbar,
                                    double N, double beta);

/// max/min of the positive entries is at most `factor`.
bool cstar_stable(const std::vector<double>& cstars, double factor = 2.0);

}  // namespace elab::modulated
