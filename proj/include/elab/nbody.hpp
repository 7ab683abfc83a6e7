#pragma once

// Exact bosonic N-body dynamics on a d = 1 grid, N in {2, 3}:
//   i hbar d_t psi = [sum_j -(hbar^2/2) d_j^2 + (1/N) sum_{i<j} V_N(x_i - x_j)] psi.
// These runs verify structure (hierarchy, traces, conservation), not the
// three-dimensional theorem constants.

#include <cstddef>
#include <functional>
#include <vector>

#include "elab/hnls.hpp"
#include "elab/kernel.hpp"
#include "elab/potentials.hpp"

namespace elab::nbody {

inline constexpr std::size_t kDefaultMemoryCap = std::size_t{1} << 24;

struct NBodyWaveFunction {
  BoxSpec box;  // one-particle box
  int N = 2;
  std::vector<cplx> psi;  // n^N values, particle 1 slowest
  PhysicalScales scales;

  std::size_t size() const noexcept { return psi.size(); }
};

/// Throws MemoryBudgetError when n^N exceeds `cap` complex values.
void check_memory(const BoxSpec& box, int N, std::size_t cap = kDefaultMemoryCap);

/// psi = phi^{(x) N}. scales.N must equal N.
NBodyWaveFunction product_state(const Field& phi, int N, const PhysicalScales& scales,
                                std::size_t cap = kDefaultMemoryCap);

double norm(const NBodyWaveFunction& w);
/// max |psi - psi o tau| over all particle transpositions tau.
double symmetry_defect(const NBodyWaveFunction& w);

/// Strang splitting: half kinetic step over the full N-dimensional frequency
/// grid, pair-potential phase in position, half kinetic step. Unitary.
class Solver {
 public:
  Solver(const BoxSpec& box, int N, const Field& v_n, double hbar, double dt);
  void step(std::vector<cplx>& psi) const;
  int budget_warnings() const noexcept { return warnings_; }

 private:
  void kinetic_half(std::vector<cplx>& psi) const;

  BoxSpec box_;
  int N_;
  std::vector<int> dims_;
  std::vector<cplx> half_phase_;
  std::vector<cplx> pair_phase_;
  int warnings_ = 0;
};

NBodyWaveFunction nbody_step(const NBodyWaveFunction& w, const Field& v_n, double dt);

/// gamma^(k) = Tr_{k+1..N} |psi><psi| for 1 <= k < N.
DensityKernel marginal(const NBodyWaveFunction& w, int k);
/// |psi><psi| as an order-N kernel.
DensityKernel density_matrix(const NBodyWaveFunction& w);

struct TraceObservables {
  Field mass;      // gamma1(x; x)
  Field momentum;  // Im(hbar d_x gamma1)(x; x)
  Field pressure;  // int V_N(x - y) gamma2(x, y; x, y) dy
};
TraceObservables trace_observables(const DensityKernel& g1, const DensityKernel& g2, const Field& v_n, double hbar);

struct NBodySnapshot {
  double t = 0.0;
  NBodyWaveFunction psi;
};

void evolve(NBodyWaveFunction& w, const Field& v_n, double dt, int steps, int every,
            const std::function<void(int, const NBodyWaveFunction&)>& on_snapshot);

/// Hilbert-Schmidt residual of the hierarchy equation for gamma^(k) at every
/// interior snapshot, the time derivative by centred differences. The
/// collision term is contracted directly from psi. `drop_collision` removes
/// it (mutation testing).
std::vector<double> bbgky_residual(const std::vector<NBodySnapshot>& traj, int k, const Field& v_n,
                                   bool drop_collision = false);

/// <psi, (H/N + 1)^k psi> for k in {1, 2}.
double energy_moment(const NBodyWaveFunction& w, int k, const Field& v_n);

struct ComparisonRow {
  double t = 0.0;
  double density_L2 = 0.0;
  double momentum_L1 = 0.0;
  double momentum_L54 = 0.0;
  double pressure_L1 = 0.0;
};

/// Distances between the N-body trace observables and the H-NLS densities
/// at matching snapshots.
std::vector<ComparisonRow> compare_with_hnls(const std::vector<NBodySnapshot>& nbody,
                                             const std::vector<std::pair<double, Field>>& hnls, const Field& v_n,
                                             double hbar);

/// Small-grid interacting scene: L = 6, phi the WKB lift of a Gaussian
/// (s = 0.5) with phase -(0.3/k) cos(k x), and V_N = N^beta V(N^beta x) for a
/// unit Gaussian V sampled directly on the grid. At n = 32 the scaled
/// interaction is periodic rather than decayed at the box edge.
struct NBodyScene {
  BoxSpec box;
  PhysicalScales scales;
  Field phi0;
  Field v_n;
  double b0 = 0.0;
};
NBodyScene make_nbody_scene(int N, int n = 32, double hbar = 0.5, bool interacting = true, double beta = 0.5);

}  // namespace elab::nbody
