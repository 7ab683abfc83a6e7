#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "elab/nbody.hpp"

using namespace elab;
using namespace elab::nbody;
using std::numbers::pi;

namespace {

std::vector<NBodySnapshot> run(const NBodyScene& sc, int N, double dt, double T, int every) {
  auto w = product_state(sc.phi0, N, sc.scales);
  std::vector<NBodySnapshot> traj;
  evolve(w, sc.v_n, dt, static_cast<int>(std::llround(T / dt)), every,
         [&](int s, const NBodyWaveFunction& x) { traj.push_back({s * dt, x}); });
  return traj;
}

double series_max(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("memory cap names the admissible grid") {
  const auto box = BoxSpec::make(1, 6.0, 512);
  try {
    check_memory(box, 3);
    FAIL("expected MemoryBudgetError");
  } catch (const MemoryBudgetError& e) {
    CHECK(e.required() == std::size_t{512} * 512 * 512);
    CHECK(std::string(e.what()).find("largest admissible n is 256") != std::string::npos);
  }
  CHECK_NOTHROW(check_memory(BoxSpec::make(1, 6.0, 256), 3));
  CHECK_THROWS_AS(check_memory(BoxSpec::make(1, 6.0, 8), 4), ValidationError);
}

TEST_CASE("free product of plane waves evolves exactly") {
  const double L = 2 * pi, xi = 2.0, hbar = 0.5, dt = 0.01;
  const auto box = BoxSpec::make(1, L, 16);
  const auto phi = Field::from_function(box, [&](const Point& x) { return std::polar(1 / std::sqrt(L), xi * x[0]); });
  const auto s = PhysicalScales::make(hbar, 3, 0.5, 1);
  const auto w = product_state(phi, 3, s);
  const auto next = nbody_step(w, Field(box), dt);
  const auto phase = std::polar(1.0, -3 * hbar * xi * xi * dt / 2);
  double err = 0.0;
  for (std::size_t f = 0; f < w.size(); ++f) err = std::max(err, std::abs(next.psi[f] - w.psi[f] * phase));
  CHECK(err < 1e-12);
  CHECK(energy_moment(w, 1, Field(box)) == doctest::Approx(1 + hbar * hbar * xi * xi / 2).epsilon(1e-12));
}

TEST_CASE("steps are unitary and keep bosonic symmetry") {
  for (int N : {2, 3}) {
    const auto sc = make_nbody_scene(N);
    auto w = product_state(sc.phi0, N, sc.scales);
    CHECK(std::abs(norm(w) - 1.0) < 1e-10);
    Solver solver(sc.box, N, sc.v_n, sc.scales.hbar, 0.01);
    for (int i = 0; i < 5; ++i) {
      const double before = norm(w);
      solver.step(w.psi);
      CHECK(std::abs(norm(w) - before) < 1e-13);
      CHECK(symmetry_defect(w) < 1e-10);
    }
  }
}

TEST_CASE("Strang step is second order for N = 2") {
  const auto sc = make_nbody_scene(2);
  auto final_state = [&](double dt) {
    auto w = product_state(sc.phi0, 2, sc.scales);
    evolve(w, sc.v_n, dt, static_cast<int>(std::llround(0.2 / dt)), 1 << 30, {});
    return w.psi;
  };
  const auto a = final_state(0.02), b = final_state(0.01), c = final_state(0.005);
  auto diff = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(x[i] - y[i]);
    return std::sqrt(s);
  };
  CHECK(std::log2(diff(a, b) / diff(b, c)) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("marginals of product states") {
  const auto sc = make_nbody_scene(3);
  const auto w = product_state(sc.phi0, 3, sc.scales);
  const auto g1 = marginal(w, 1), g2 = marginal(w, 2);
  CHECK(max_abs(g1 - outer_power(sc.phi0, 1)) < 1e-12);
  CHECK(std::abs(trace(g2) - 1.0) < 1e-10);
  CHECK(max_abs(partial_trace(g2) - g1) < 1e-10);
  CHECK_THROWS_AS(marginal(w, 3), ValidationError);
  const auto obs = trace_observables(g1, g2, sc.v_n, sc.scales.hbar);
  const auto rho = sc.phi0.abs2();
  CHECK((obs.pressure - rho * grid::periodic_convolution(sc.v_n, rho)).max_abs() < 1e-10);
  CHECK(std::abs(grid::integrate_re(obs.mass) - 1.0) < 1e-10);
}

TEST_CASE("real states carry no momentum") {
  const auto sc = make_nbody_scene(2);
  const auto w = product_state(sc.phi0.abs2(), 2, sc.scales);
  const auto obs = trace_observables(marginal(w, 1), density_matrix(w), sc.v_n, 0.5);
  CHECK(obs.momentum.max_abs() < 1e-12);
}

TEST_CASE("marginal invariants along an interacting flow") {
  const auto sc = make_nbody_scene(3);
  const auto traj = run(sc, 3, 0.01, 0.3, 10);
  for (const auto& s : traj) {
    const auto g1 = marginal(s.psi, 1), g2 = marginal(s.psi, 2);
    CHECK(hermiticity_defect(g1) < 1e-10);
    CHECK(hermiticity_defect(g2) < 1e-10);
    CHECK(std::abs(trace(g1) - 1.0) < 1e-8);
    CHECK(min_eigenvalue(g1) >= -1e-8);
    CHECK(compressed_min_eigenvalue(g2, 64, 17) >= -1e-8);
    CHECK(max_abs(partial_trace(g2) - g1) < 1e-10);
  }
  // the interacting state is no longer a product: gamma1 is mixed
  const auto g1 = marginal(traj.back().psi, 1);
  CHECK(min_eigenvalue(g1) < 1.0 - 1e-6);
}

TEST_CASE("hierarchy residual") {
  SUBCASE("free hierarchy closes") {
    const auto sc = make_nbody_scene(2, 32, 0.5, false);
    const auto traj = run(sc, 2, 2e-3, 0.1, 5);
    const auto fine = run(sc, 2, 1e-3, 0.1, 5);
    const double r1 = series_max(bbgky_residual(traj, 1, sc.v_n)), r2 = series_max(bbgky_residual(fine, 1, sc.v_n));
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
  }
  SUBCASE("interacting, second order and mutation-sensitive") {
    const auto sc = make_nbody_scene(2);
    const auto a = run(sc, 2, 2e-3, 0.1, 5), b = run(sc, 2, 1e-3, 0.1, 5);
    const double r1 = series_max(bbgky_residual(a, 1, sc.v_n)), r2 = series_max(bbgky_residual(b, 1, sc.v_n));
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
    CHECK(series_max(bbgky_residual(b, 1, sc.v_n, true)) > 10 * r2);
  }
  SUBCASE("cadence mismatch") {
    const auto sc = make_nbody_scene(2);
    auto a = run(sc, 2, 2e-3, 0.05, 5);
    a.erase(a.begin() + 1);
    CHECK_THROWS_AS(bbgky_residual(a, 1, sc.v_n), ValidationError);
  }
}

TEST_CASE("energy moments") {
  const auto sc = make_nbody_scene(2);
  auto w = product_state(sc.phi0, 2, sc.scales);
  const double m1 = energy_moment(w, 1, sc.v_n), m2 = energy_moment(w, 2, sc.v_n);
  CHECK(m2 >= m1 * m1 - 1e-8);
  CHECK_THROWS_AS(energy_moment(w, 3, sc.v_n), ValidationError);
  evolve(w, sc.v_n, 5e-4, 200, 1 << 30, {});
  CHECK(std::abs(energy_moment(w, 1, sc.v_n) - m1) < 1e-8 * m1);
  CHECK(std::abs(energy_moment(w, 2, sc.v_n) - m2) < 1e-8 * m2);
}

TEST_CASE("comparison with H-NLS") {
  auto hnls_traj = [](const NBodyScene& sc, double dt, double T, int every) {
    std::vector<std::pair<double, Field>> out;
    hnls::WaveFunction phi{sc.phi0, sc.scales};
    hnls::evolve(phi, sc.v_n, dt, static_cast<int>(std::llround(T / dt)), every,
                 [&](int s, const hnls::WaveFunction& x) { out.emplace_back(s * dt, x.psi); });
    return out;
  };
  SUBCASE("free dynamics agree exactly") {
    for (int N : {2, 3}) {
      const auto sc = make_nbody_scene(N, 32, 0.5, false);
      const auto rows = compare_with_hnls(run(sc, N, 0.01, 0.2, 5), hnls_traj(sc, 0.01, 0.2, 5), sc.v_n, 0.5);
      for (const auto& r : rows) {
        CHECK(r.density_L2 < 1e-10);
        CHECK(r.momentum_L1 < 1e-10);
        CHECK(r.pressure_L1 < 1e-10);
      }
    }
  }
  SUBCASE("identical data at t = 0, N = 3 no worse than N = 2") {
    double worst[2] = {0, 0};
    for (int N : {2, 3}) {
      const auto sc = make_nbody_scene(N);
      const auto rows = compare_with_hnls(run(sc, N, 0.01, 0.3, 10), hnls_traj(sc, 0.01, 0.3, 10), sc.v_n, 0.5);
      CHECK(rows.front().density_L2 < 1e-12);
      CHECK(rows.front().pressure_L1 < 1e-12);
      for (const auto& r : rows) worst[N - 2] = std::max(worst[N - 2], r.density_L2);
    }
    MESSAGE("sup density error N=2: " << worst[0] << ", N=3: " << worst[1]);
    CHECK(worst[1] <= 1.2 * worst[0]);
  }
}

TEST_CASE("kernel snapshot round trip") {
  const auto sc = make_nbody_scene(2, 16);
  const auto g = outer_power(sc.phi0, 2);
  std::stringstream ss;
  write_kernel(ss, g);
  CHECK(ss.str().size() == 4 + 4 * 3 + 8 + 4 + 16 * g.values.size());
  const auto back = read_kernel(ss);
  CHECK(back.k == 2);
  CHECK(max_abs(back - g) == 0.0);
}
