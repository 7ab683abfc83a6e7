#include "elab/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "elab/hnls.hpp"
#include "elab/pool.hpp"

namespace elab::coupled {

namespace {

euler::FluidState on_box(const euler::FluidState& s, const BoxSpec& box) {
  if (s.rho.box() == box) return s;
  euler::FluidState out{grid::resample(s.rho, box).real_part(), VectorField(box), s.t};
  for (int j = 0; j < s.u.dim(); ++j) out.u[j] = grid::resample(s.u[j], box).real_part();
  return out;
}

}  // namespace

CoupledResult run_coupled(const CoupledConfig& cfg,
                          const std::function<void(const modulated::CoupledSnapshot&)>& on_snapshot) {
  if (cfg.every < 1) throw ValidationError("snapshot cadence must be >= 1", "solver.every");
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw ValidationError("dt and T must be positive", "solver");
  const auto& box = cfg.phi0.box();
  if (box.d != cfg.fluid0.rho.box().d || box.L != cfg.fluid0.rho.box().L)
    throw ValidationError("H-NLS and Euler boxes must share d and L");
  require_same_box(box, cfg.v_n.box(), "run_coupled");

  hnls::Solver solver(cfg.v_n, cfg.hbar, cfg.dt);
  Field phi = cfg.phi0;
  euler::FluidState fluid = cfg.fluid0;
  fluid.t = 0.0;
  if (euler::violates(cfg.monitor, euler::read_monitor(fluid)))
    throw Error("initial fluid state already violates the regularity monitor");

  CoupledResult res;
  const int steps = static_cast<int>(std::llround(cfg.T / cfg.dt));
  auto emit = [&](int s) {
    if (on_snapshot) on_snapshot(modulated::CoupledSnapshot{s * cfg.dt, phi, on_box(fluid, box)});
  };
  emit(0);
  for (int s = 1; s <= steps; ++s) {
    auto next = euler::euler_step(fluid, cfg.dt, cfg.b0);
    next.t = s * cfg.dt;
    const auto reading = euler::read_monitor(next);
    if (euler::violates(cfg.monitor, reading)) {
      res.horizon_shortfall = true;
      res.stop = reading.rho_min < cfg.monitor.rho_floor ? euler::StopReason::NegativeDensity
                                                         : euler::StopReason::SpectralTail;
      if ((s - 1) % cfg.every != 0) emit(s - 1);
      break;
    }
    fluid = std::move(next);
    solver.step(phi);
    res.steps = s;
    if (s % cfg.every == 0 || s == steps) emit(s);
  }
  res.t_end = res.steps * cfg.dt;
  res.budget_warnings = solver.budget_warnings();
  return res;
}

CoupledConfig scene_config(const std::string& scene, const PhysicalScales& scales, int n, int euler_n, double dt,
                           double T, int every, const scenes::PotentialSpec& potential) {
  const auto fine = scenes::make_scene(scene, n, scales.hbar, potential);
  const int ne = euler_n > 0 ? std::min(n, euler_n) : n;
  const auto coarse = ne == n ? fine : scenes::make_scene(scene, ne, scales.hbar, potential);
  CoupledConfig cfg;
  cfg.phi0 = hnls::wkb_initial_data(fine.phi_rho, fine.S, scales).psi;
  cfg.fluid0 = euler::FluidState{coarse.rho_in, coarse.u_in, 0.0};
  if (fine.interacting) {
    cfg.v_n = scale_potential(fine.potential, scales);
    cfg.b0 = fine.potential.b0;
  } else {
    cfg.v_n = Field(fine.box);
    cfg.b0 = 0.0;
  }
  cfg.hbar = scales.hbar;
  cfg.dt = dt;
  cfg.T = T;
  cfg.every = every;
  return cfg;
}

int job_points(const StudySettings& s, const Job& job) {
  const auto sc = scenes::make_scene(s.scene, 8, job.hbar, s.potential);
  int n = std::max(s.n_min, required_points(sc.potential, sc.box.L, job.N, job.beta));
  int p = 8;
  while (p < n) p *= 2;
  return p;
}

JobResult run_job(const StudySettings& s, const Job& job) {
  const auto scales = PhysicalScales::make(job.hbar, job.N, job.beta, 1);
  JobResult r;
  r.job = job;
  r.n = job_points(s, job);
  r.dt = std::min(s.dt_max, s.dt_per_hbar * job.hbar);
  const int steps = static_cast<int>(std::llround(s.T / r.dt));
  r.dt = s.T / steps;
  r.T = s.T;
  const int every = std::max(1, steps / std::max(1, s.snapshots));
  auto cfg = scene_config(s.scene, scales, r.n, s.euler_n, r.dt, s.T, every, s.potential);
  const auto v_hat = grid::spectrum(cfg.v_n);
  double prev_t = 0.0, prev_p = 0.0;
  bool first = true;
  PhysicalScales sc = scales;
  const auto res = run_coupled(cfg, [&](const modulated::CoupledSnapshot& snap) {
    const auto rho_n = snap.phi.abs2();
    const auto rho = snap.fluid.rho;
    const auto q = hnls::densities(hnls::WaveFunction{snap.phi, sc});
    const Field dj = q.J[0] - rho * snap.fluid.u[0];
    r.err_density_L2 = std::max(r.err_density_L2, grid::l2_norm(rho_n - rho));
    r.err_momentum_L1 = std::max(r.err_momentum_L1, grid::lp_norm(dj, 1.0));
    r.err_momentum_L54 = std::max(r.err_momentum_L54, grid::lp_norm(dj, 1.25));
    const auto mf = grid::convolve_with_spectrum(v_hat, rho_n);
    const double p = grid::lp_norm(rho_n * mf - rho * rho * cplx(cfg.b0), 1.0);
    if (!first) r.err_pressure_L1 += 0.5 * (snap.t - prev_t) * (p + prev_p);
    prev_t = snap.t;
    prev_p = p;
    const double m = modulated::modulated_energy(snap.phi, snap.fluid, cfg.v_n, cfg.b0, job.hbar).total;
    if (first) r.M0 = m;
    r.Mmax = std::max(r.Mmax, m);
    r.times.push_back(snap.t);
    r.M.push_back(m);
    r.boundary_mass = std::max(r.boundary_mass, grid::boundary_shell_max(rho_n));
    r.lap_div_u_sup = std::max(r.lap_div_u_sup, modulated::lap_div_u_sup(snap.fluid));
    const double er = modulated::error_term(snap.phi, snap.fluid, cfg.v_n, cfg.b0, sc).value;
    r.max_abs_er_scaled = std::max(r.max_abs_er_scaled, std::abs(er) / scales.mean_field_budget());
    first = false;
  });
  r.certified_T = res.t_end;
  r.shortfall = res.horizon_shortfall;
  r.budget_warnings = res.budget_warnings;
  const auto g = modulated::gronwall_certificate(r.times, r.M, job.hbar, job.N, job.beta);
  r.Cstar = g.cstar;
  r.certificate = g.certified && g.lower_bound_holds;
  return r;
}

StudyReport run_study(const StudySettings& s, std::vector<Job> jobs, int threads) {
  if (jobs.empty()) throw ValidationError("sweep lists must be non-empty", "scales");
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tuple(-a.hbar, a.N, a.beta) < std::tuple(-b.hbar, b.N, b.beta);
  });
  for (const auto& j : jobs) (void)PhysicalScales::make(j.hbar, j.N, j.beta, 1);
  StudyReport rep;
  rep.rows.resize(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) { rep.rows[i] = run_job(s, jobs[i]); });
  for (const auto& r : rep.rows) rep.partial = rep.partial || r.shortfall;

  double n_max = 0.0, h_max = 0.0;
  for (const auto& r : rep.rows) {
    n_max = std::max(n_max, r.job.N);
    h_max = std::max(h_max, r.job.hbar);
  }
  std::vector<std::pair<double, double>> by_hbar, by_n;
  for (const auto& r : rep.rows) {
    if (r.job.N == n_max) by_hbar.emplace_back(r.job.hbar, r.err_density_L2);
    if (r.job.hbar == h_max) by_n.emplace_back(r.job.N, r.err_density_L2);
  }
  auto try_fit = [](const std::vector<std::pair<double, double>>& pts) -> std::optional<RateFit> {
    if (pts.size() < 3) return std::nullopt;
    return fit_rate(pts);
  };
  rep.hbar_fit = try_fit(by_hbar);
  rep.n_fit = try_fit(by_n);
  return rep;
}

StudyReport convergence_study(const StudySettings& s, const std::vector<double>& hbar_list,
                              const std::vector<double>& N_list, double beta, int threads) {
  if (hbar_list.empty()) throw ValidationError("sweep list must be non-empty", "scales.hbar");
  if (N_list.empty()) throw ValidationError("sweep list must be non-empty", "scales.N");
  std::vector<Job> jobs;
  for (double h : hbar_list)
    for (double N : N_list) jobs.push_back(Job{h, N, beta});
  return run_study(s, std::move(jobs), threads);
}

ShapeCheck check_shape(const std::vector<JobResult>& rows, const std::function<double(const JobResult&)>& err,
                       const std::function<double(const Job&)>& shape, double factor) {
  if (rows.size() < 2) throw ValidationError("shape check needs at least two jobs");
  std::vector<const JobResult*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->job.hbar > b->job.hbar; });
  const std::size_t train = (order.size() + 1) / 2;
  ShapeCheck c;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double ratio = err(*order[i]) / shape(order[i]->job);
    if (i < train)
      c.c_train = std::max(c.c_train, ratio);
    else
      c.max_heldout_ratio = std::max(c.max_heldout_ratio, ratio);
  }
  c.ok = c.max_heldout_ratio <= factor * c.c_train;
  return c;
}

double theorem_shape(const Job& j, double p) {
  return std::pow(1.0 / (std::pow(j.hbar, 4) * std::pow(j.N, j.beta)) + j.hbar * j.hbar, p);
}

}  // namespace elab::coupled
