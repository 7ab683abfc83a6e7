#include <cmath>
#include <numbers>

#include "doctest.h"
#include "elab/euler.hpp"

using namespace elab;
using namespace elab::euler;
using std::numbers::pi;

namespace {

const double kB0 = std::sqrt(pi);

FluidState bump(const BoxSpec& box, double amp_u = 0.0) {
  FluidState s{Field::from_function(box, [](const Point& x) {
                 return cplx(std::exp(-x[0] * x[0] / 0.5) / std::sqrt(0.5 * pi));
               }),
               VectorField(box), 0.0};
  s.u[0] = Field::from_function(box, [&](const Point& x) { return cplx(amp_u * std::sin(2 * pi * x[0] / box.L)); });
  return s;
}

double state_diff(const FluidState& a, const FluidState& b) {
  return std::max((a.rho - b.rho).max_abs(), (a.u[0] - b.u[0]).max_abs());
}

}  // namespace

TEST_CASE("equilibria have zero tendencies") {
  const auto box = BoxSpec::make(2, 4.0, 16);
  FluidState s{Field::constant(box, 0.0625), VectorField(box), 0.0};
  auto t = euler_rhs(s, kB0);
  CHECK(t.drho.max_abs() < 1e-15);
  CHECK(t.du[0].max_abs() < 1e-15);
  s.u[0] = Field::constant(box, 0.4);
  s.u[1] = Field::constant(box, -0.2);
  t = euler_rhs(s, kB0);
  CHECK(t.drho.max_abs() < 1e-15);
  CHECK(t.du[1].max_abs() < 1e-15);
  const auto next = euler_step(s, 0.01, kB0);
  CHECK(state_diff(next, s) < 1e-15);
}

TEST_CASE("linearised mode tendencies") {
  const double L = 8.0, eps = 1e-3, rho0 = 1.0 / L, k = 2 * pi / L;
  const auto box = BoxSpec::make(1, L, 64);
  FluidState s{Field::from_function(box, [&](const Point& x) { return cplx(rho0 + eps * std::cos(k * x[0])); }),
               VectorField(box), 0.0};
  const auto t = euler_rhs(s, kB0);
  const auto expect = Field::from_function(box, [&](const Point& x) { return cplx(eps * kB0 * k * std::sin(k * x[0])); });
  CHECK((t.du[0] - expect).max_abs() < 1e-14);
  CHECK(t.drho.max_abs() < 1e-16);
}

TEST_CASE("acoustic phase speed") {
  const double rho0 = 1.0 / 8.0;
  const double c = measure_acoustic_speed(kB0, rho0, 8.0, 64, 1e-4, 2.0, 0.01);
  CHECK(std::abs(c / std::sqrt(kB0 * rho0) - 1.0) < 0.01);
}

TEST_CASE("RK4 is fourth order in dt") {
  const auto box = BoxSpec::make(1, 8.0, 64);
  const auto s0 = bump(box, 0.3);
  auto run = [&](double dt) {
    auto s = s0;
    for (int i = 0; i < static_cast<int>(std::llround(0.384 / dt)); ++i) s = euler_step(s, dt, kB0);
    return s;
  };
  const auto a = run(0.032), b = run(0.016), c = run(0.008);
  const double order = std::log2(state_diff(a, b) / state_diff(b, c));
  CHECK(order == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("CFL violation names the admissible step") {
  const auto box = BoxSpec::make(1, 8.0, 64);
  const auto s = bump(box, 0.3);
  const double lim = admissible_dt(s, kB0);
  try {
    (void)euler_step(s, 2 * lim, kB0);
    FAIL("expected CflError");
  } catch (const CflError& e) {
    CHECK(e.admissible_dt() == doctest::Approx(lim));
  }
  CHECK_NOTHROW(euler_step(s, -0.9 * lim, kB0));
}

TEST_CASE("mass conservation and reversibility") {
  const auto box = BoxSpec::make(1, 8.0, 128);
  const auto s0 = bump(box, 0.3);
  auto s = s0;
  const double m0 = grid::integrate_re(s.rho);
  for (int i = 0; i < 100; ++i) {
    s = euler_step(s, 0.005, kB0);
    CHECK(std::abs(grid::integrate_re(s.rho) - m0) < 1e-12);
  }
  for (int i = 0; i < 100; ++i) s = euler_step(s, -0.005, kB0);
  CHECK(state_diff(s, s0) < 1e-8);
}

TEST_CASE("momentum form agrees with velocity form") {
  const auto box = BoxSpec::make(1, 8.0, 256);
  auto v = bump(box, 0.3);
  v.rho += Field::constant(box, 0.05);  // keep rho away from vacuum
  auto m = to_momentum(v);
  for (int i = 0; i < 250; ++i) {
    v = euler_step(v, 0.002, kB0);
    m = momentum_step(m, 0.002, kB0);
  }
  const auto back = to_velocity(m);
  CHECK(state_diff(back, v) < 1e-6 * std::max(v.rho.max_abs(), v.u[0].max_abs()));
}

TEST_CASE("regularity monitor") {
  const auto box = BoxSpec::make(1, 8.0, 256);
  RegularityMonitor mon;
  SUBCASE("equilibrium runs to T with an empty tail") {
    FluidState s{Field::constant(box, 1.0 / 8.0), VectorField(box), 0.0};
    const auto rep = evolve_euler(s, 0.5, 0.01, kB0, mon, 10, [](int, const FluidState&, const MonitorReading& r) {
      CHECK(r.tail_fraction == 0.0);
    });
    CHECK(rep.reason == StopReason::ReachedHorizon);
    CHECK(rep.certified_T == doctest::Approx(0.5));
  }
  SUBCASE("Gaussian bump certifies a positive horizon") {
    auto s = bump(box);
    const auto rep = evolve_euler(s, 0.5, 0.005, kB0, mon);
    CHECK(rep.certified_T > 0.0);
    CHECK(std::abs(grid::integrate_re(s.rho) - 1.0) < 1e-10);
  }
  SUBCASE("steepening wave halts before the gradient grows tenfold") {
    auto s = bump(box, 1.5);
    const auto rep = evolve_euler(s, 5.0, 0.002, kB0, mon);
    CHECK(rep.reason != StopReason::ReachedHorizon);
    CHECK(rep.certified_T < 5.0);
    CHECK(rep.last.max_gradient < 10.0 * rep.initial.max_gradient);
  }
  SUBCASE("rough initial data is refused") {
    FluidState s{Field::from_function(box, [](const Point& x) { return cplx(x[0] > 0 ? 0.2 : 0.05); }),
                 VectorField(box), 0.0};
    CHECK_THROWS_AS(evolve_euler(s, 0.1, 0.01, kB0, mon), Error);
  }
}
