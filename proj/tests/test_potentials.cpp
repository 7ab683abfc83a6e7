#include <cmath>
#include <numbers>

#include "doctest.h"
#include "elab/potentials.hpp"

using namespace elab;
using std::numbers::pi;

namespace {

Field gaussian_density(const BoxSpec& box, double s) {
  return Field::from_function(box, [&](const Point& x) {
    return cplx(std::exp(-x[0] * x[0] / (2 * s * s)) / std::sqrt(2 * pi * s * s));
  });
}

}  // namespace

TEST_CASE("physical scales") {
  CHECK_THROWS_AS(PhysicalScales::make(0.0, 10, 0.5, 1), ValidationError);
  CHECK_THROWS_AS(PhysicalScales::make(0.1, 1, 0.5, 1), ValidationError);
  CHECK_THROWS_AS(PhysicalScales::make(0.1, 10, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(PhysicalScales::make(0.1, 10, 0.5, 4), ValidationError);
  CHECK(PhysicalScales::make(0.1, 10, 0.3, 3).theorem_regime());
  CHECK_FALSE(PhysicalScales::make(0.1, 10, 0.4, 3).theorem_regime());
  CHECK_FALSE(PhysicalScales::make(0.1, 10, 0.7, 3).theorem_regime());
  const auto s = PhysicalScales::make(0.5, 16, 0.5, 1);
  CHECK(s.mean_field_budget() == doctest::Approx(16.0 / 4.0));
}

TEST_CASE("Gaussian coupling constants") {
  const auto b1 = BoxSpec::make(1, 16.0, 128);
  CHECK(std::abs(gaussian_potential(b1, 1.0, 1.0).b0 - std::sqrt(pi)) < 1e-10);
  CHECK(gaussian_potential(b1, 1.0, 2.0).b0 == 2.0 * gaussian_potential(b1, 1.0, 1.0).b0);
  const auto b3 = BoxSpec::make(3, 12.0, 32);
  CHECK(std::abs(gaussian_potential(b3, 1.0, 1.0).b0 - std::pow(pi, 1.5)) < 1e-9);
  CHECK_THROWS_AS(gaussian_potential(BoxSpec::make(1, 4.0, 64), 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(gaussian_potential(b1, -1.0, 1.0), ValidationError);
}

TEST_CASE("scaling identities") {
  const auto box = BoxSpec::make(1, 16.0, 2048);
  const auto v = gaussian_potential(box, 1.0, 1.5);
  SUBCASE("N = 1 is the identity") { CHECK((scale_potential(v, 1.0, 0.5) - v.profile).max_abs() < 1e-15); }
  SUBCASE("mass is b0 for every scale") {
    for (double N : {2.0, 16.0, 100.0, 1000.0})
      for (double beta : {0.1, 0.3, 0.5})
        CHECK(std::abs(grid::integrate_re(scale_potential(v, N, beta)) - v.b0) < 1e-8 * v.b0);
  }
  SUBCASE("width and peak") {
    // N^{d beta} V(N^beta x) at x = 0 is 4 * amplitude for N = 16, beta = 1/2.
    const auto vn = scale_potential(v, PhysicalScales::make(0.5, 16, 0.5, 1));
    CHECK(vn[box.n / 2].real() == doctest::Approx(4.0 * 1.5).epsilon(1e-14));
    // exp(-1) at the scaled width 0.25
    const auto at = vn[box.n / 2 + 32].real();  // h = 1/128, 32 h = 0.25
    CHECK(at == doctest::Approx(6.0 * std::exp(-1.0)).epsilon(1e-13));
  }
  SUBCASE("evenness is exact") {
    const auto vn = scale_potential(v, 3.7, 0.5);
    for (std::size_t i = 0; i < vn.size(); ++i) CHECK(vn[i] == vn[box.reflect(i)]);
  }
  SUBCASE("under-resolution names the required n") {
    try {
      (void)scale_potential(v, 1e6, 0.5);
      FAIL("expected ResolutionError");
    } catch (const ResolutionError& e) {
      CHECK(e.required_n() == required_points(v, 16.0, 1e6, 0.5));
      CHECK(e.required_n() > box.n);
    }
  }
}

TEST_CASE("sampled profiles") {
  const auto box = BoxSpec::make(1, 16.0, 512);
  const auto g = gaussian_potential(box, 1.0, 1.0);
  const auto s = sampled_potential(g.profile);
  CHECK(s.b0 == doctest::Approx(g.b0).epsilon(1e-14));
  CHECK(s.width == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(grid::integrate_re(scale_potential(s, 16, 0.5)) - s.b0) < 1e-8 * s.b0);
  CHECK((scale_potential(s, 16, 0.5) - scale_potential(g, 16, 0.5)).max_abs() < 1e-8);
  Field odd = g.profile;
  odd[box.n / 2 + 3] += 0.1;
  CHECK_THROWS_AS(sampled_potential(odd), ValidationError);
  CHECK_THROWS_AS(sampled_potential(g.profile * cplx(-1.0)), ValidationError);
  CHECK_THROWS_AS(sampled_potential(Field(box)), ValidationError);
}

TEST_CASE("mollifier defect") {
  const auto box = BoxSpec::make(1, 16.0, 2048);
  const auto v = gaussian_potential(box, 1.0, 1.0);
  const auto f = gaussian_density(box, 1.0);
  SUBCASE("constants are reproduced exactly") {
    for (double N : {4.0, 16.0, 64.0}) CHECK(mollifier_defect(v, Field::constant(box, 1.0), 0.5, N) < 1e-11);
  }
  SUBCASE("rate for Gaussian data") {
    const auto study = mollifier_defect_rate(v, f, 0.5, {4, 16, 64, 256});
    CHECK(study.fit.slope <= -0.4);
    // smooth data sees the full second-order moment rate, about -2 beta
    CHECK(study.fit.slope == doctest::Approx(-1.0).epsilon(0.1));
  }
  SUBCASE("linearity") {
    const auto a = mollifier_defect_rate(v, f, 0.5, {4, 16, 64});
    const auto b = mollifier_defect_rate(v, f * cplx(2.0), 0.5, {4, 16, 64});
    for (std::size_t i = 0; i < 3; ++i) CHECK(b.defect[i] == doctest::Approx(2.0 * a.defect[i]).epsilon(1e-12));
    CHECK(b.fit.slope == doctest::Approx(a.fit.slope).epsilon(1e-10));
  }
  SUBCASE("property: monotone decay with 5% jitter") {
    double prev = INFINITY;
    for (double N = 4; N <= 1024; N *= 2) {
      const double e = mollifier_defect(v, f, 0.5, N);
      CHECK(e <= 1.05 * prev);
      prev = e;
    }
  }
  CHECK_THROWS_AS(mollifier_defect_rate(v, f, 0.5, {16, 4, 64}), ValidationError);
  CHECK_THROWS_AS(mollifier_defect_rate(v, f, 0.5, {4, 16}), ValidationError);
}

TEST_CASE("restriction diagnostic is reported, not enforced") {
  const auto s = PhysicalScales::make(0.5, 1e6, 0.3, 3);
  const auto r = restriction_diagnostic(s, 1.0, 1.0, 1.0);
  CHECK(r.lhs_log_log_N == doctest::Approx(std::log(std::log(1e6))));
  CHECK(r.rhs_exponent == doctest::Approx(std::pow(1.0 / std::pow(0.5, 7), 2)));
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("candidate C_V norms") {
  const auto box = BoxSpec::make(1, 16.0, 256);
  const auto v = gaussian_potential(box, 1.0, 1.0);
  CHECK(v.norms.l1 == doctest::Approx(std::sqrt(pi)).epsilon(1e-10));
  CHECK(v.norms.linf == doctest::Approx(1.0));
  // int |x V'| = int 2 x^2 e^{-x^2} = sqrt(pi) in 1D
  CHECK(v.norms.x_dot_grad == doctest::Approx(std::sqrt(pi)).epsilon(1e-8));
  CHECK(v.norms.l3_2 == doctest::Approx(std::pow(std::sqrt(pi / 1.5), 2.0 / 3.0)).epsilon(1e-10));
}
