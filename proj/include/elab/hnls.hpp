#pragma once

// Hartree-type NLS  i hbar d_t phi = -(hbar^2/2) Lap phi + (V_N * |phi|^2) phi.

#include <functional>
#include <vector>

#include "elab/grid.hpp"
#include "elab/potentials.hpp"

namespace elab::hnls {

struct WaveFunction {
  Field psi;
  PhysicalScales scales;
};

struct QuantumDensities {
  Field rho;      // |phi|^2
  VectorField J;  // hbar Im(conj(phi) grad phi)
};

/// phi = sqrt(rho_in) exp(i S / hbar). rho_in must be nonnegative with unit mass.
WaveFunction wkb_initial_data(const Field& rho_in, const Field& S, const PhysicalScales& scales);

/// Strang splitting: half kinetic phase, nonlinear phase evaluated on the
/// midpoint density, half kinetic phase. Exactly unitary.
class Solver {
 public:
  Solver(const Field& v_n, double hbar, double dt);

  void step(Field& psi);
  double dt() const noexcept { return dt_; }
  /// Largest dt seen inside the 0.5 hbar / max|V_N * rho| accuracy budget.
  double last_dt_budget() const noexcept { return last_budget_; }
  /// Number of steps that exceeded the budget (recorded, never fatal).
  int budget_warnings() const noexcept { return warnings_; }

 private:
  void kinetic_half(Field& psi) const;

  BoxSpec box_;
  double hbar_;
  double dt_;
  std::vector<cplx> v_hat_;
  std::vector<cplx> half_phase_;
  double last_budget_ = 0.0;
  int warnings_ = 0;
};

WaveFunction hnls_step(const WaveFunction& phi, const Field& v_n, double dt);

struct Energy {
  double kinetic = 0.0;      // (1/2) ||hbar grad phi||^2
  double interaction = 0.0;  // (1/2) <V_N * rho, rho>
  double total() const noexcept { return kinetic + interaction; }
};
Energy hnls_energy(const WaveFunction& phi, const Field& v_n);

QuantumDensities densities(const WaveFunction& phi);

/// ||(rho_next - rho_prev)/(2 dt) + div J||_{L2} at the middle snapshot.
double continuity_residual(const Field& prev, const Field& mid, const Field& next, double dt, double hbar);

/// Momentum balance residual at the middle snapshot:
/// d_t J^j + d_k[hbar^2 Re(d_j conj(phi) d_k phi) - (hbar^2/4) d_jk rho] + d_j(V_N * rho) rho,
/// returned as the L2 norm of the vector residual.
double momentum_residual(const Field& prev, const Field& mid, const Field& next, double dt, const Field& v_n,
                         double hbar);

struct TrajectoryRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy_kinetic = 0.0;
  double energy_interaction = 0.0;
};

/// Integrate `steps` steps, calling `on_snapshot(step_index, psi)` every
/// `every` steps (including step 0 and the final step).
void evolve(WaveFunction& phi, const Field& v_n, double dt, int steps, int every,
            const std::function<void(int, const WaveFunction&)>& on_snapshot);

}  // namespace elab::hnls
