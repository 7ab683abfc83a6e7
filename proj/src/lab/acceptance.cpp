#include "elab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "elab/coupled.hpp"
#include "elab/hierarchy.hpp"
#include "elab/hnls.hpp"
#include "elab/nbody.hpp"
#include "elab/pipelines.hpp"

namespace elab::lab {

namespace {

using std::numbers::pi;

struct Verdict {
  bool passed = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator()(const std::string& key, const T& v) {
    if (!first_) os_ << ", ";
    first_ = false;
    os_ << key << " " << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_{[] {
    std::ostringstream o;
    o.precision(4);
    return o;
  }()};
  bool first_ = true;
};

int steps_for(double T, double dt) { return static_cast<int>(std::llround(T / dt)); }

// Expanding scene at hbar = 0.3, N = 16, n = 256: the resolved H-NLS reference run.
struct StandardScene {
  PhysicalScales scales = PhysicalScales::make(0.3, 16, 0.5, 1);
  scenes::Scene sc = scenes::make_scene("expanding", 256);
  Field v_n = scale_potential(sc.potential, scales);
  hnls::WaveFunction phi = hnls::wkb_initial_data(sc.phi_rho, sc.S, scales);
};

// Runs shared between criteria, computed on first use.
class Shared {
 public:
  explicit Shared(int threads) : threads_(threads) {}

  const coupled::StudyReport& rate_study() {
    if (!rate_) rate_ = coupled::convergence_study(coupled::StudySettings{}, {0.2, 0.1, 0.05}, {1e6}, 0.5, threads_);
    return *rate_;
  }

  // hbar down, N up with 1 / (hbar^4 N^beta) = 10 hbar^2
  const coupled::StudyReport& diagonal_sweep() {
    if (!diagonal_) {
      coupled::StudySettings s;
      s.scene = "compressive";
      std::vector<coupled::Job> jobs;
      for (double h : {0.4, 0.3, 0.2}) jobs.push_back({h, std::pow(1.0 / (10 * std::pow(h, 6)), 2), 0.5});
      diagonal_ = coupled::run_study(s, jobs, threads_);
    }
    return *diagonal_;
  }

  int threads() const { return threads_; }

 private:
  int threads_;
  std::optional<coupled::StudyReport> rate_, diagonal_;
};

Verdict conservation(Shared&) {
  StandardScene s;
  const double e0 = hnls::hnls_energy(s.phi, s.v_n).total();
  const double m0 = grid::integrate_re(s.phi.psi.abs2());
  double dm = 0.0, de = 0.0;
  hnls::evolve(s.phi, s.v_n, 1e-3, 1000, 10, [&](int, const hnls::WaveFunction& w) {
    dm = std::max(dm, std::abs(grid::integrate_re(w.psi.abs2()) - m0));
    de = std::max(de, std::abs(hnls::hnls_energy(w, s.v_n).total() - e0) / std::abs(e0));
  });
  return {dm < 1e-10 && de < 1e-6, Detail()("mass drift", dm)("relative energy drift", de).str()};
}

Verdict local_conservation(Shared&) {
  StandardScene s;
  const double t_mid = 0.2, hbar = s.scales.hbar;
  std::vector<std::pair<double, double>> cont, mom;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    auto w = s.phi;
    const int mid = steps_for(t_mid, dt);
    std::vector<Field> snaps;
    hnls::evolve(w, s.v_n, dt, mid + 1, 1, [&](int step, const hnls::WaveFunction& x) {
      if (step >= mid - 1) snaps.push_back(x.psi);
    });
    cont.emplace_back(dt, hnls::continuity_residual(snaps[0], snaps[1], snaps[2], dt, hbar));
    mom.emplace_back(dt, hnls::momentum_residual(snaps[0], snaps[1], snaps[2], dt, s.v_n, hbar));
  }
  const double oc = fit_rate(cont).slope, om = fit_rate(mom).slope;
  return {std::abs(oc - 2) <= 0.3 && std::abs(om - 2) <= 0.3, Detail()("continuity order", oc)("momentum order", om).str()};
}

Verdict modulated_identity(Shared&) {
  const auto scales = PhysicalScales::make(0.2, 16, 0.5, 1);
  auto run = [&](double dt) {
    const auto cfg = coupled::scene_config("audit", scales, 256, 0, dt, 0.3, 10);
    std::vector<modulated::CoupledSnapshot> traj;
    coupled::run_coupled(cfg, [&](const modulated::CoupledSnapshot& s) { traj.push_back(s); });
    return std::pair{traj, cfg};
  };
  const auto [coarse, cfg] = run(2e-3);
  const auto fine = run(1e-3).first;
  const double r1 = modulated::evolution_audit(coarse, cfg.v_n, cfg.b0, 0.2).max_residual;
  const double r2 = modulated::evolution_audit(fine, cfg.v_n, cfg.b0, 0.2).max_residual;
  Detail d;
  d("residual ratio", r1 / r2);
  bool ok = r1 / r2 >= 3 && r1 / r2 <= 5;
  const char* names[] = {"strain", "div", "hbar", "err"};
  int i = 0;
  for (auto drop : {modulated::DropTerm::Strain, modulated::DropTerm::Div, modulated::DropTerm::Hbar,
                    modulated::DropTerm::Err}) {
    const double f = modulated::evolution_audit(fine, cfg.v_n, cfg.b0, 0.2, drop).max_residual / r2;
    ok = ok && f > 10;
    d(std::string("drop ") + names[i++], f);
  }
  return {ok, d.str()};
}

Verdict wkb(Shared&) {
  Detail d;
  bool ok = true;
  for (const char* name : {"expanding", "compressive", "audit"}) {
    double worst = 0.0;
    for (double hbar : {0.3, 0.1}) {
      const auto sc = scenes::make_scene(name, 256);
      const auto phi = hnls::wkb_initial_data(sc.phi_rho, sc.S, PhysicalScales::make(hbar, 16, 0.5, 1));
      worst = std::max(worst, wkb_identity_defect(phi.psi, sc.u_in[0], sc.phi_rho, hbar));
    }
    ok = ok && worst < 1e-8;
    d(name, worst);
  }
  return {ok, d.str()};
}

Verdict semiclassical_rate(Shared& sh) {
  const auto& rep = sh.rate_study();
  const double slope = rep.hbar_fit->slope;
  const auto shape = coupled::check_shape(
      rep.rows, [](const coupled::JobResult& r) { return r.err_density_L2; },
      [](const coupled::Job& j) { return j.hbar; });
  Detail d;
  d("hbar slope", slope)("C train", shape.c_train)("held-out ratio", shape.max_heldout_ratio);
  for (const auto& r : rep.rows) d("err(" + std::to_string(r.job.hbar).substr(0, 4) + ")", r.err_density_L2);
  return {slope >= 0.9 && shape.ok && !rep.partial, d.str()};
}

Verdict mollifier(Shared&) {
  const auto box = BoxSpec::make(1, 16.0, 2048);
  const auto v = gaussian_potential(box, 1.0, 1.0);
  const auto f = Field::from_function(box, [](const Point& x) { return cplx(std::exp(-x[0] * x[0] / 2) / std::sqrt(2 * pi)); });
  const auto study = mollifier_defect_rate(v, f, 0.5, {4, 16, 64, 256});
  return {study.fit.slope <= -0.5 + 0.1, Detail()("log-defect slope", study.fit.slope)("r^2", study.fit.r_squared).str()};
}

Verdict pressure(Shared& sh) {
  const auto& rows = sh.diagonal_sweep().rows;  // hbar descending: moving down the diagonal
  Detail d;
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d("hbar " + std::to_string(rows[i].job.hbar).substr(0, 3), rows[i].err_pressure_L1);
    if (i > 0) ok = ok && rows[i].err_pressure_L1 <= 1.05 * rows[i - 1].err_pressure_L1;
  }
  return {ok && rows.size() == 3, d.str()};
}

Verdict gronwall(Shared& sh) {
  std::vector<double> cstars;
  bool certified = true;
  int runs = 0;
  for (const auto* rep : {&sh.diagonal_sweep(), &sh.rate_study()})
    for (const auto& r : rep->rows) {
      ++runs;
      certified = certified && r.certificate;
      if (r.Cstar > 0) cstars.push_back(r.Cstar);
    }
  std::vector<double> t, M;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.01 * i);
    M.push_back(std::exp(10 * t.back()));
  }
  const double rec = modulated::gronwall_certificate(t, M, 1e-2, 1e40, 0.5).cstar;
  const bool stable = modulated::cstar_stable(cstars);
  double lo = cstars.empty() ? 0 : *std::min_element(cstars.begin(), cstars.end());
  double hi = cstars.empty() ? 0 : *std::max_element(cstars.begin(), cstars.end());
  return {certified && stable && !cstars.empty() && std::abs(rec / 10 - 1) <= 0.1,
          Detail()("certified runs", std::to_string(runs) + (certified ? " of " : " (some failed) of ") + std::to_string(runs))(
              "C* range", "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]")("injected 10, recovered", rec)
              .str()};
}

Verdict nbody_suite(Shared&) {
  Detail d;
  bool ok = true;
  auto run = [](const nbody::NBodyScene& sc, int N, double dt, double T, int every) {
    auto w = nbody::product_state(sc.phi0, N, sc.scales);
    std::vector<nbody::NBodySnapshot> traj;
    nbody::evolve(w, sc.v_n, dt, steps_for(T, dt), every,
                  [&](int s, const nbody::NBodyWaveFunction& x) { traj.push_back({s * dt, x}); });
    return traj;
  };
  auto hnls_run = [](const nbody::NBodyScene& sc, double dt, double T, int every) {
    std::vector<std::pair<double, Field>> out;
    hnls::WaveFunction phi{sc.phi0, sc.scales};
    hnls::evolve(phi, sc.v_n, dt, steps_for(T, dt), every,
                 [&](int s, const hnls::WaveFunction& x) { out.emplace_back(s * dt, x.psi); });
    return out;
  };
  auto sup = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };

  double herm = 0, trace_err = 0, min_eig = 1, tower = 0, free_err = 0, drift = 0;
  std::optional<double> worst_order;
  for (int N : {2, 3}) {
    const auto sc = nbody::make_nbody_scene(N);
    for (const auto& s : run(sc, N, 0.01, 0.3, 10)) {
      const auto g1 = nbody::marginal(s.psi, 1);
      herm = std::max(herm, nbody::hermiticity_defect(g1));
      trace_err = std::max(trace_err, std::abs(nbody::trace(g1) - 1.0));
      min_eig = std::min(min_eig, nbody::min_eigenvalue(g1));
      if (N == 3) {
        const auto g2 = nbody::marginal(s.psi, 2);
        herm = std::max(herm, nbody::hermiticity_defect(g2));
        min_eig = std::min(min_eig, nbody::compressed_min_eigenvalue(g2, 64, 17));
        tower = std::max(tower, nbody::max_abs(nbody::partial_trace(g2) - g1));
      }
    }
    const auto a = run(sc, N, 2e-3, 0.1, 5), b = run(sc, N, 1e-3, 0.1, 5);
    for (int k = 1; k < N; ++k) {
      const double order = std::log2(sup(nbody::bbgky_residual(a, k, sc.v_n)) / sup(nbody::bbgky_residual(b, k, sc.v_n)));
      if (!worst_order || std::abs(order - 2) > std::abs(*worst_order - 2)) worst_order = order;
    }
    const auto free_sc = nbody::make_nbody_scene(N, 32, 0.5, false);
    for (const auto& r : nbody::compare_with_hnls(run(free_sc, N, 0.01, 0.2, 5), hnls_run(free_sc, 0.01, 0.2, 5),
                                                  free_sc.v_n, 0.5))
      free_err = std::max({free_err, r.density_L2, r.momentum_L1, r.pressure_L1});
    auto w = nbody::product_state(sc.phi0, N, sc.scales);
    const double m1 = nbody::energy_moment(w, 1, sc.v_n), m2 = nbody::energy_moment(w, 2, sc.v_n);
    nbody::evolve(w, sc.v_n, 5e-4, 200, 1 << 30, {});
    drift = std::max({drift, std::abs(nbody::energy_moment(w, 1, sc.v_n) - m1) / m1,
                      std::abs(nbody::energy_moment(w, 2, sc.v_n) - m2) / m2});
  }
  ok = herm < 1e-10 && trace_err < 1e-8 && min_eig >= -1e-8 && tower < 1e-10 && worst_order && std::abs(*worst_order - 2) <= 0.3 &&
       free_err < 1e-10 && drift < 1e-8;
  d("hermiticity", herm)("trace", trace_err)("min eigenvalue", min_eig)("tower", tower)("worst BBGKY order",
                                                                                             worst_order.value_or(0))(
      "free vs H-NLS", free_err)("moment drift", drift);
  return {ok, d.str()};
}

Verdict combinatorics(Shared&) {
  bool counts = true, bounds = true;
  std::uint64_t largest = 0;
  for (int k = 1; k <= 4; ++k)
    for (int j = 1; j <= 6; ++j) {
      std::uint64_t maps = 0;
      hierarchy::for_each_history(k, j, [&](const hierarchy::CollisionHistory& h) { maps += h.admissible(); });
      counts = counts && maps == hierarchy::history_count(k, j);
      bounds = bounds && hierarchy::km_class_count(k, j).holds;
      largest = std::max(largest, maps);
    }
  return {counts && bounds, Detail()("count formula", counts ? "matches" : "differs")("class bound",
                                                                                      bounds ? "holds" : "violated")(
                                "largest enumeration", largest)
                                .str()};
}

Verdict collapsing(Shared& sh) {
  hierarchy::CollapsingProbeConfig cfg;
  cfg.threads = sh.threads();
  const auto box = BoxSpec::make(1, cfg.L, cfg.n);
  const auto v = gaussian_potential(box, scenes::kPotentialWidth, scenes::kPotentialAmplitude).profile;
  const auto rep = hierarchy::collapsing_probe(v, {1, 0.5, 0.25, 0.125}, 50, 0, cfg);
  const double max_ratio = *std::max_element(rep.max_ratio_per_hbar.begin(), rep.max_ratio_per_hbar.end());
  return {std::isfinite(max_ratio) && rep.fitted_exponent <= 0.05,
          Detail()("max ratio", max_ratio)("fitted exponent", rep.fitted_exponent).str()};
}

Verdict euler_sanity(Shared&) {
  const double b0 = std::sqrt(pi), rho0 = 1.0 / 8.0;
  const double c = euler::measure_acoustic_speed(b0, rho0, 8.0, 64, 1e-4, 2.0, 0.01);
  const double speed_err = std::abs(c / std::sqrt(b0 * rho0) - 1.0);

  const auto box = BoxSpec::make(1, 8.0, 128);
  euler::FluidState eq{Field::constant(box, rho0), VectorField(box), 0.0};
  eq.u[0] = Field::constant(box, 0.25);
  auto s = eq;
  for (int i = 0; i < 100; ++i) s = euler::euler_step(s, 0.01, b0);
  const double eq_err = std::max((s.rho - eq.rho).max_abs(), (s.u[0] - eq.u[0]).max_abs());

  const auto fine = BoxSpec::make(1, 8.0, 256);
  euler::FluidState v{Field::from_function(fine, [](const Point& x) {
                        return cplx(std::exp(-x[0] * x[0] / 0.5) / std::sqrt(0.5 * pi) + 0.05);
                      }),
                      VectorField(fine), 0.0};
  v.u[0] = Field::from_function(fine, [](const Point& x) { return cplx(0.3 * std::sin(2 * pi * x[0] / 8.0)); });
  auto m = euler::to_momentum(v);
  for (int i = 0; i < 250; ++i) {
    v = euler::euler_step(v, 0.002, b0);
    m = euler::momentum_step(m, 0.002, b0);
  }
  const auto back = euler::to_velocity(m);
  const double scale = std::max(v.rho.max_abs(), v.u[0].max_abs());
  const double form_err = std::max((back.rho - v.rho).max_abs(), (back.u[0] - v.u[0]).max_abs()) / scale;
  return {speed_err < 0.01 && eq_err < 1e-14 && form_err < 1e-6,
          Detail()("acoustic speed error", speed_err)("equilibrium drift", eq_err)("form disagreement", form_err).str()};
}

struct Criterion {
  int id;
  const char* title;
  double budget;
  Verdict (*run)(Shared&);
};

const Criterion kCriteria[] = {
    {1, "conservation suite", 30, conservation},
    {2, "local conservation residuals", 60, local_conservation},
    {3, "modulated-energy evolution identity", 120, modulated_identity},
    {4, "WKB identity", 1, wkb},
    {5, "semiclassical rate", 600, semiclassical_rate},
    {6, "mollifier rate", 60, mollifier},
    {7, "pressure emergence", 600, pressure},
    {8, "Gronwall certificate", 60, gronwall},
    {9, "N-body structural suite", 900, nbody_suite},
    {10, "hierarchy combinatorics", 10, combinatorics},
    {11, "collapsing probe", 300, collapsing},
    {12, "Euler sanity", 60, euler_sanity},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  Shared shared(opt.threads);
  std::vector<CriterionResult> out;
  for (const auto& c : kCriteria) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    r.budget_seconds = c.budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto v = c.run(shared);
      r.passed = v.passed;
      r.detail = v.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += "; over the runtime budget";
    }
    if (opt.on_result) opt.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << " (" << r.seconds << " s, budget "
     << r.budget_seconds << " s): " << r.detail;
  return os.str();
}

}  // namespace elab::lab
