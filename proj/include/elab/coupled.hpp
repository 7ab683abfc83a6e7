#pragma once

// H-NLS and Euler advanced on one shared clock, and the (hbar, N) harness
// that measures how far the quantum densities sit from the fluid.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elab/euler.hpp"
#include "elab/modulated.hpp"
#include "elab/rate_fit.hpp"
#include "elab/scene.hpp"

namespace elab::coupled {

struct CoupledConfig {
  Field phi0;
  euler::FluidState fluid0;  // may live on a coarser box with the same L
  Field v_n;
  double b0 = 0.0;
  double hbar = 0.1;
  double dt = 1e-3;
  double T = 0.5;
  int every = 1;  // snapshot cadence in steps
  euler::RegularityMonitor monitor;
};

struct CoupledResult {
  int steps = 0;
  double t_end = 0.0;
  bool horizon_shortfall = false;  // the Euler monitor stopped the run before T
  euler::StopReason stop = euler::StopReason::ReachedHorizon;
  int budget_warnings = 0;
};

/// Steps both systems with the same dt. Snapshots (step 0, every `every`
/// steps and the last step) carry the fluid resampled onto phi's grid.
CoupledResult run_coupled(const CoupledConfig& cfg,
                          const std::function<void(const modulated::CoupledSnapshot&)>& on_snapshot);

/// Coupled configuration for a named scene: phi is the WKB lift of phi_rho
/// with phase S on an n-point grid; Euler starts from (rho_in, u_in) on
/// min(n, euler_n) points.
CoupledConfig scene_config(const std::string& scene, const PhysicalScales& scales, int n, int euler_n, double dt,
                           double T, int every, const scenes::PotentialSpec& potential = {});

struct StudySettings {
  std::string scene = "expanding";
  double T = 0.5;
  int snapshots = 50;
  int euler_n = 512;
  double dt_max = 2e-3;
  double dt_per_hbar = 0.02;  // dt = min(dt_max, dt_per_hbar * hbar)
  int n_min = 256;
  scenes::PotentialSpec potential;
};

struct Job {
  double hbar = 0.1;
  double N = 1e6;
  double beta = 0.5;
};

struct JobResult {
  Job job;
  int n = 0;
  double dt = 0.0;
  double T = 0.0;
  double err_density_L2 = 0.0;    // sup_t ||rho_N - rho||_L2
  double err_momentum_L1 = 0.0;   // sup_t ||J_N - rho u||_L1
  double err_momentum_L54 = 0.0;  // sup_t ||J_N - rho u||_L5/4
  double err_pressure_L1 = 0.0;   // int_0^T ||rho_N (V_N * rho_N) - b0 rho^2||_L1
  double M0 = 0.0;
  double Mmax = 0.0;
  double Cstar = 0.0;
  bool certificate = false;
  double certified_T = 0.0;
  bool shortfall = false;
  double boundary_mass = 0.0;  // max over snapshots of |phi|^2 on the box shell
  double lap_div_u_sup = 0.0;
  double max_abs_er_scaled = 0.0;  // max_t |Er| hbar^4 N^beta
  int budget_warnings = 0;
  std::vector<double> times;
  std::vector<double> M;
};

/// Grid size for a job: the resolution rule for V_N, never below n_min.
int job_points(const StudySettings& s, const Job& job);
JobResult run_job(const StudySettings& s, const Job& job);

struct StudyReport {
  std::vector<JobResult> rows;  // sorted by (hbar desc, N asc, beta asc)
  std::optional<RateFit> hbar_fit;  // density error vs hbar at the largest N
  std::optional<RateFit> n_fit;     // density error vs N at the largest hbar
  bool partial = false;             // some job hit a horizon shortfall
};

/// Runs the jobs on a worker pool and reduces in sorted order.
StudyReport run_study(const StudySettings& s, std::vector<Job> jobs, int threads);
/// Cartesian product of hbar_list x N_list at one beta.
StudyReport convergence_study(const StudySettings& s, const std::vector<double>& hbar_list,
                              const std::vector<double>& N_list, double beta, int threads);

/// Train/validate check of an error against a predicted shape g(job): the
/// constant is fitted as max(err / g) over the training half (larger hbar
/// first) and every held-out ratio must stay below factor * C_train.
struct ShapeCheck {
  double c_train = 0.0;
  double max_heldout_ratio = 0.0;
  bool ok = false;
};
ShapeCheck check_shape(const std::vector<JobResult>& rows, const std::function<double(const JobResult&)>& err,
                       const std::function<double(const Job&)>& shape, double factor = 2.0);

/// (1/(hbar^4 N^beta) + hbar^2)^{p}, the shape of the theorem's bounds.
double theorem_shape(const Job& j, double p);

}  // namespace elab::coupled
