#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "elab/coupled.hpp"
#include "elab/hnls.hpp"

using namespace elab;
using namespace elab::modulated;
using std::numbers::pi;

namespace {

struct Setup {
  scenes::Scene sc;
  PhysicalScales scales;
  Field vn;
  Field phi;
  euler::FluidState fluid;
  Setup(const std::string& name, int n, double hbar, double N) : sc(scenes::make_scene(name, n, hbar)) {
    scales = PhysicalScales::make(hbar, N, 0.5, 1);
    vn = scale_potential(sc.potential, scales);
    phi = hnls::wkb_initial_data(sc.phi_rho, sc.S, scales).psi;
    fluid = euler::FluidState{sc.rho_in, sc.u_in, 0.0};
  }
};

double w_pairing(const Field& vn, double b0, const Field& rho) {
  // <W_N * rho, rho> with W_N = V_N - b0 delta
  return grid::inner_re(grid::periodic_convolution(vn, rho), rho) - b0 * grid::inner_re(rho, rho);
}

std::vector<CoupledSnapshot> trajectory(const std::string& scene, double dt, double T = 0.3) {
  const auto cfg = coupled::scene_config(scene, PhysicalScales::make(0.2, 16, 0.5, 1), 256, 0, dt, T, 10);
  std::vector<CoupledSnapshot> traj;
  coupled::run_coupled(cfg, [&](const CoupledSnapshot& s) { traj.push_back(s); });
  return traj;
}

}  // namespace

TEST_CASE("breakdown equals the single-expression assembly") {
  for (const char* name : {"expanding", "compressive", "audit"}) {
    Setup s(name, 256, 0.2, 16);
    const auto m = modulated_energy(s.phi, s.fluid, s.vn, s.sc.potential.b0, 0.2);
    CHECK(m.total == m.kinetic_mod + m.interaction + m.euler_sq + m.cross);
    const double direct = modulated_energy_direct(s.phi, s.fluid, s.vn, s.sc.potential.b0, 0.2);
    CHECK(std::abs(direct - m.total) < 1e-12 * std::max(1.0, std::abs(m.total)));
  }
}

TEST_CASE("WKB data against a matching fluid") {
  Setup s("expanding", 256, 0.2, 16);
  const double b0 = s.sc.potential.b0;
  const auto m = modulated_energy(s.phi, s.fluid, s.vn, b0, 0.2);
  Field amp(s.sc.box);
  for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = std::sqrt(s.sc.rho_in[i].real());
  const double expect = 0.5 * 0.04 * std::pow(grid::l2_norm(grid::spectral_derivative(amp, 0)), 2) +
                        0.5 * w_pairing(s.vn, b0, s.sc.rho_in);
  CHECK(m.total == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("real phi at rest") {
  Setup s("expanding", 256, 0.3, 16);
  const double b0 = s.sc.potential.b0;
  euler::FluidState rest{s.sc.rho_in, VectorField(s.sc.box), 0.0};
  Field phi = s.phi.abs2();
  for (auto& v : phi.values()) v = std::sqrt(v.real());
  const auto m = modulated_energy(phi, rest, s.vn, b0, 0.3);
  const double expect = 0.5 * 0.09 * std::pow(grid::l2_norm(grid::spectral_derivative(phi, 0)), 2) +
                        0.5 * w_pairing(s.vn, b0, s.sc.rho_in);
  CHECK(m.total == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("potential terms are linear in V") {
  Setup s("audit", 256, 0.2, 16);
  const double b0 = s.sc.potential.b0;
  const auto a = modulated_energy(s.phi, s.fluid, s.vn, b0, 0.2);
  const auto b = modulated_energy(s.phi, s.fluid, s.vn * cplx(2.0), 2 * b0, 0.2);
  CHECK(b.interaction + b.euler_sq + b.cross == doctest::Approx(2 * (a.interaction + a.euler_sq + a.cross)).epsilon(1e-14));
  CHECK(b.kinetic_mod == a.kinetic_mod);
}

TEST_CASE("box mismatch is rejected") {
  Setup s("audit", 256, 0.2, 16);
  Setup t("audit", 512, 0.2, 16);
  CHECK_THROWS_AS(modulated_energy(s.phi, t.fluid, s.vn, 1.0, 0.2), ValidationError);
}

TEST_CASE("error term") {
  SUBCASE("vanishes at rest") {
    Setup s("audit", 256, 0.2, 16);
    euler::FluidState rest{s.sc.rho_in, VectorField(s.sc.box), 0.0};
    CHECK(error_term(s.phi, rest, s.vn, s.sc.potential.b0, s.scales).value == 0.0);
  }
  SUBCASE("shrinks with N") {
    Setup a("compressive", 1024, 0.2, 4), b("compressive", 1024, 0.2, 256);
    const auto ea = error_term(a.phi, a.fluid, a.vn, a.sc.potential.b0, a.scales);
    const auto eb = error_term(b.phi, b.fluid, b.vn, b.sc.potential.b0, b.scales);
    CHECK(std::abs(eb.value) < std::abs(ea.value));
    CHECK(eb.budget == doctest::Approx(1.0 / (std::pow(0.2, 4) * 16)));
  }
  SUBCASE("scaled by the budget it stays bounded across a sweep") {
    double lo = INFINITY, hi = 0.0;
    for (double hbar : {0.1, 0.2})
      for (double N : {16.0, 64.0, 256.0}) {
        Setup s("compressive", 1024, hbar, N);
        const auto e = error_term(s.phi, s.fluid, s.vn, s.sc.potential.b0, s.scales);
        const double scaled = std::abs(e.value) / e.budget;
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
      }
    MESSAGE("max |Er| hbar^4 N^beta = " << hi);
    CHECK(hi < 1.0);
  }
}

TEST_CASE("evolution audit at equilibrium") {
  const auto box = BoxSpec::make(1, 8.0, 128);
  const auto v = gaussian_potential(box, 0.5, 2.0);
  const auto vn = scale_potential(v, 4, 0.5);
  coupled::CoupledConfig cfg;
  cfg.phi0 = Field::constant(box, std::sqrt(1.0 / 8.0));
  cfg.fluid0 = euler::FluidState{Field::constant(box, 1.0 / 8.0), VectorField(box), 0.0};
  cfg.v_n = vn;
  cfg.b0 = v.b0;
  cfg.hbar = 0.2;
  cfg.dt = 1e-3;
  cfg.T = 0.1;
  cfg.every = 10;
  std::vector<CoupledSnapshot> traj;
  coupled::run_coupled(cfg, [&](const CoupledSnapshot& s) { traj.push_back(s); });
  const auto a = evolution_audit(traj, vn, v.b0, 0.2);
  CHECK(a.max_residual < 1e-12);
  for (double t : a.max_abs_term) CHECK(t < 1e-12);
}

TEST_CASE("evolution identity is second order and detects dropped terms") {
  for (const char* scene : {"audit", "expanding", "compressive"}) {
    CAPTURE(scene);
    const auto coarse = trajectory(scene, 2e-3), fine = trajectory(scene, 1e-3);
    const auto v = scenes::make_scene(scene, 256);
    const auto vn = scale_potential(v.potential, 16, 0.5);
    const double r1 = evolution_audit(coarse, vn, v.potential.b0, 0.2).max_residual;
    const double r2 = evolution_audit(fine, vn, v.potential.b0, 0.2).max_residual;
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
    if (std::string(scene) == "audit")
      for (auto d : {DropTerm::Strain, DropTerm::Div, DropTerm::Hbar, DropTerm::Err})
        CHECK(evolution_audit(fine, vn, v.potential.b0, 0.2, d).max_residual > 10 * r2);
  }
}

TEST_CASE("audit rejects clock and cadence mismatches") {
  auto traj = trajectory("audit", 2e-3, 0.1);
  const auto v = scenes::make_scene("audit", 256);
  const auto vn = scale_potential(v.potential, 16, 0.5);
  auto skewed = traj;
  skewed[2].fluid.t += 1e-3;
  CHECK_THROWS_AS(evolution_audit(skewed, vn, v.potential.b0, 0.2), ValidationError);
  auto gappy = traj;
  gappy.erase(gappy.begin() + 2);
  CHECK_THROWS_AS(evolution_audit(gappy, vn, v.potential.b0, 0.2), ValidationError);
}

TEST_CASE("Gronwall certificate") {
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(0.01 * i);
  SUBCASE("constant series needs no constant") {
    const auto r = gronwall_certificate(t, std::vector<double>(t.size(), 0.3), 0.1, 1e4, 0.5);
    CHECK(r.cstar == 0.0);
    CHECK(r.certified);
  }
  SUBCASE("recovers an injected growth rate") {
    std::vector<double> M;
    for (double s : t) M.push_back(std::exp(10 * s));
    const auto r = gronwall_certificate(t, M, 1e-2, 1e40, 0.5);
    CHECK(r.cstar == doctest::Approx(10.0).epsilon(0.1));
    CHECK(r.certified);
    CHECK(r.lower_bound_holds);
  }
  SUBCASE("negative excursions are lifted by the budget") {
    std::vector<double> M;
    for (double s : t) M.push_back(0.01 - 0.05 * s);
    const auto r = gronwall_certificate(t, M, 0.5, 100, 0.5);
    CHECK(r.lower_bound_holds);
    for (double m : M) CHECK(m + r.cstar * r.budget >= 0.0);
  }
  CHECK_THROWS_AS(gronwall_certificate({}, {}, 0.1, 10, 0.5), ValidationError);
  CHECK(cstar_stable({0.17, 0.18, 0.3}));
  CHECK_FALSE(cstar_stable({0.1, 0.3}));
}

TEST_CASE("transport scene: both dynamics coincide") {
  coupled::StudySettings s;
  s.scene = "transport";
  s.T = 0.2;
  s.snapshots = 10;
  const auto rep = coupled::convergence_study(s, {0.2}, {16}, 0.5, 1);
  const auto& r = rep.rows.at(0);
  CHECK(r.err_density_L2 < 1e-12);
  CHECK(r.err_momentum_L1 < 1e-12);
  CHECK(r.err_pressure_L1 < 1e-12);
  CHECK(r.certified_T == doctest::Approx(0.2));
}

TEST_CASE("small sweep: determinism, rate shape and plateau report") {
  coupled::StudySettings s;
  s.scene = "compressive";
  s.T = 0.2;
  s.snapshots = 20;
  const auto a = coupled::convergence_study(s, {0.2, 0.1}, {16, 64, 256}, 0.5, 2);
  const auto b = coupled::convergence_study(s, {0.1, 0.2}, {256, 16, 64}, 0.5, 1);
  REQUIRE(a.rows.size() == 6);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].job.hbar == b.rows[i].job.hbar);
    CHECK(a.rows[i].err_density_L2 == b.rows[i].err_density_L2);
    CHECK(a.rows[i].certificate);
    CHECK(a.rows[i].boundary_mass < 1e-10);
  }
  REQUIRE(a.n_fit.has_value());
  MESSAGE("density error N-slope at hbar = 0.2: " << a.n_fit->slope);
  const auto dens = coupled::check_shape(
      a.rows, [](const coupled::JobResult& r) { return r.err_density_L2; },
      [](const coupled::Job& j) { return coupled::theorem_shape(j, 0.5); });
  CHECK(dens.ok);
  const auto mom = coupled::check_shape(
      a.rows, [](const coupled::JobResult& r) { return r.err_momentum_L54; },
      [](const coupled::Job& j) { return coupled::theorem_shape(j, (4.0 / 1.25 - 3.0) / 2.0); });
  CHECK(mom.ok);
}
