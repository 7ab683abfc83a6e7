#pragma once

// Pseudo-spectral compressible Euler solver (velocity form primary, momentum
// form as a cross-check):
//   d_t rho + div(rho u) = 0,   d_t u + (u . grad) u + b0 grad rho = 0.
// Valid only up to gradient blow-up; no shock capturing.

#include <functional>
#include <string>

#include "elab/grid.hpp"

namespace elab::euler {

struct FluidState {
  Field rho;
  VectorField u;
  double t = 0.0;
};

struct Tendency {
  Field drho;
  VectorField du;
};

/// Spectral tendencies with 2/3-rule dealiasing of the quadratic products.
Tendency euler_rhs(const FluidState& state, double b0);

/// Largest dt with dt (max|u| + sqrt(b0 max rho)) / h <= cfl.
double admissible_dt(const FluidState& state, double b0, double cfl = 0.5);

/// Classical RK4 step. Negative dt integrates backwards. Throws CflError when
/// |dt| exceeds admissible_dt.
FluidState euler_step(const FluidState& state, double dt, double b0);

struct RegularityMonitor {
  double stop_threshold = 1e-6;  // tail_fraction limit
  double rho_floor = -1e-8;
};

struct MonitorReading {
  /// Fluctuation energy in the top third of the dealiased band
  /// (2n/9 < |m|_inf <= n/3) over total fluctuation energy.
  double tail_fraction = 0.0;
  double max_gradient = 0.0;  // max_{x,i,j} |d_i u_j|
  double rho_min = 0.0;
};

MonitorReading read_monitor(const FluidState& state);
bool violates(const RegularityMonitor& m, const MonitorReading& r);

enum class StopReason { ReachedHorizon, SpectralTail, NegativeDensity };
std::string to_string(StopReason r);

struct EvolveReport {
  double certified_T = 0.0;  // numerical surrogate for the smooth-solution horizon
  StopReason reason = StopReason::ReachedHorizon;
  int steps = 0;
  MonitorReading initial;
  MonitorReading last;
};

/// Integrate to min(T, monitor stop). `on_snapshot(step, state, reading)` is
/// called every `every` steps and at the final accepted step. Throws Error if
/// the initial data already violates the monitor.
EvolveReport evolve_euler(FluidState& state, double T, double dt, double b0, const RegularityMonitor& monitor,
                          int every = 1,
                          const std::function<void(int, const FluidState&, const MonitorReading&)>& on_snapshot = {});

/// Phase speed of a small right-moving acoustic wave on a uniform background:
/// rho = rho0 + eps cos(k x), u = (c / rho0) eps cos(k x) with c = sqrt(b0 rho0)
/// and k the lowest box mode, tracked through the phase of that Fourier mode.
double measure_acoustic_speed(double b0, double rho0, double L, int n, double eps, double T, double dt);

// Momentum form d_t J + div(J (x) J / rho) + (1/2) grad(b0 rho^2) = 0.
struct MomentumState {
  Field rho;
  VectorField J;
  double t = 0.0;
};

MomentumState to_momentum(const FluidState& s);
FluidState to_velocity(const MomentumState& s);
MomentumState momentum_step(const MomentumState& state, double dt, double b0);

}  // namespace elab::euler
