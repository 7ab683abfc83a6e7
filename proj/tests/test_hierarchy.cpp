#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "doctest.h"
#include "elab/hierarchy.hpp"

using namespace elab;
using namespace elab::hierarchy;

namespace {

DensityKernel random_kernel(const BoxSpec& box, int k, unsigned seed) {
  DensityKernel g(box, k);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (auto& v : g.values) v = {gauss(rng), gauss(rng)};
  return g;
}

Field gaussian(const BoxSpec& box, double amp) {
  return Field::from_function(box, [&](const Point& x) { return amp * std::exp(-x[0] * x[0] / 0.25); });
}

// every map {k+1..k+j} -> {1..k+j-1} that is admissible, found without the odometer
std::uint64_t brute_force_count(int k, int j, bool nondecreasing_only) {
  const int range = k + j - 1;
  std::uint64_t total = 1, hits = 0;
  for (int i = 0; i < j; ++i) total *= static_cast<std::uint64_t>(range);
  std::vector<int> mu(static_cast<std::size_t>(j));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    bool ok = true;
    for (int i = 0; i < j; ++i, c /= static_cast<std::uint64_t>(range)) {
      mu[static_cast<std::size_t>(i)] = static_cast<int>(c % static_cast<std::uint64_t>(range)) + 1;
      ok = ok && mu[static_cast<std::size_t>(i)] < k + 1 + i;
      if (nondecreasing_only && i > 0) ok = ok && mu[static_cast<std::size_t>(i)] >= mu[static_cast<std::size_t>(i - 1)];
    }
    hits += ok;
  }
  return hits;
}

}  // namespace

TEST_CASE("collision of a product state gives rho (V * rho)") {
  const auto box = BoxSpec::make(1, 2 * std::numbers::pi, 16);
  const auto phi = Field::from_function(box, [](const Point& x) {
    return std::polar(std::exp(-x[0] * x[0]), 0.7 * x[0]);
  });
  const auto v = gaussian(box, 2.0);
  const auto b = collision_apply(nbody::outer_power(phi, 2), v, 1, CollisionSign::Plus);
  const auto rho = phi.abs2();
  const auto expected = rho * grid::periodic_convolution(v, rho);
  double err = 0.0;
  for (int i = 0; i < box.n; ++i) err = std::max(err, std::abs(b(i, i) - expected[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("collision operator structure") {
  const auto box = BoxSpec::make(1, 2 * std::numbers::pi, 8);
  const auto v = gaussian(box, 1.0);
  const auto ga = random_kernel(box, 3, 1), gb = random_kernel(box, 3, 2);
  for (int j : {1, 2}) {
    const auto plus = collision_apply(ga, v, j, CollisionSign::Plus);
    const auto minus = collision_apply(ga, v, j, CollisionSign::Minus);
    CHECK(plus.k == 2);
    for (std::size_t r = 0; r < plus.dim(); ++r) CHECK(std::abs(plus(r, r) - minus(r, r)) < 1e-12);
    CHECK(nbody::max_abs(collision_apply(ga, v, j, CollisionSign::Commutator) - (plus - minus)) < 1e-12);
    for (auto s : {CollisionSign::Plus, CollisionSign::Minus}) {
      const auto lhs = collision_apply(ga + gb, v, j, s);
      const auto rhs = collision_apply(ga, v, j, s) + collision_apply(gb, v, j, s);
      CHECK(nbody::max_abs(lhs - rhs) < 1e-12);
    }
  }
  CHECK_THROWS_AS(collision_apply(ga, v, 3, CollisionSign::Plus), ValidationError);
  CHECK_THROWS_AS(collision_apply(ga, v, 0, CollisionSign::Plus), ValidationError);
  CHECK_THROWS_AS(collision_apply(random_kernel(box, 1, 3), v, 1, CollisionSign::Plus), ValidationError);
}

TEST_CASE("collision histories") {
  SUBCASE("small cases") {
    const auto h12 = enumerate_histories(1, 2);
    REQUIRE(h12.size() == 2);
    CHECK(h12[0].mu == std::vector<int>{1, 1});
    CHECK(h12[1].mu == std::vector<int>{1, 2});
    const auto h21 = enumerate_histories(2, 1);
    REQUIRE(h21.size() == 2);
    CHECK(h21[0].mu == std::vector<int>{1});
    CHECK(h21[1].mu == std::vector<int>{2});
  }
  SUBCASE("count formula against brute force") {
    for (int k = 1; k < 10; ++k)
      for (int j = 1; k + j <= 10; ++j) {
        const auto hs = enumerate_histories(k, j);
        CHECK(hs.size() == history_count(k, j));
        if (k + j <= 8) CHECK(hs.size() == brute_force_count(k, j, false));
        std::set<std::vector<int>> distinct;
        bool all_admissible = true;
        for (const auto& h : hs) {
          all_admissible = all_admissible && h.admissible();
          distinct.insert(h.mu);
        }
        CHECK(all_admissible);
        CHECK(distinct.size() == hs.size());
      }
  }
  SUBCASE("budget") {
    CHECK(history_count(1, 11) == 39916800);
    CHECK_THROWS_AS(history_count(6, 7), ValidationError);
    CHECK_THROWS_AS(enumerate_histories(0, 2), ValidationError);
    CHECK_THROWS_AS(km_class_count(2, 0), ValidationError);
  }
}

TEST_CASE("nondecreasing classes obey the counting bound") {
  const auto c11 = km_class_count(1, 1);
  CHECK(c11.classes == 1);
  CHECK(c11.bound == 2);
  const auto c12 = km_class_count(1, 2);
  CHECK(c12.classes == 2);
  CHECK(c12.bound == 8);
  for (int k = 1; k <= 4; ++k)
    for (int j = 1; j <= 6; ++j) {
      const auto c = km_class_count(k, j);
      CHECK(c.holds);
      CHECK(c.classes <= c.bound);
      if (k + j <= 8) CHECK(c.classes == brute_force_count(k, j, true));
    }
}

TEST_CASE("collapsing probe") {
  CollapsingProbeConfig cfg;
  const auto box = BoxSpec::make(1, cfg.L, cfg.n);
  const auto v = gaussian(box, 2.0);

  SUBCASE("zero kernel") { CHECK(collapsing_ratio(DensityKernel(box, 2), v, 0.5, cfg) == 0.0); }

  SUBCASE("ratio is invariant under V -> lambda V") {
    const auto f = random_band_limited_kernel(box, 2, 11);
    for (double hbar : {1.0, 0.25}) {
      const double base = collapsing_ratio(f, v, hbar, cfg);
      for (double lambda : {2.0, 10.0}) CHECK(std::abs(collapsing_ratio(f, v * lambda, hbar, cfg) - base) < 1e-10 * base);
    }
  }

  SUBCASE("fixed kernel: hbar^-alpha suffices") {
    const auto rep = collapsing_probe(v, {1.0, 0.5, 0.25}, 1, 5, cfg);
    CHECK(rep.alpha == 1.5);
    CHECK(rep.d == 1);
    CHECK(rep.fitted_exponent <= 0.0);
  }

  SUBCASE("report does not depend on the thread count") {
    auto two = cfg;
    two.threads = 2;
    const auto a = collapsing_probe(v, {1.0, 0.5, 0.25}, 3, 40, cfg);
    const auto b = collapsing_probe(v, {1.0, 0.5, 0.25}, 3, 40, two);
    CHECK(a.ratios == b.ratios);
    // sample i is the kernel drawn from seed + i
    CHECK(collapsing_ratio(random_band_limited_kernel(box, cfg.band, 42), v, 0.5, cfg) == a.ratios[1][2]);
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(collapsing_probe(v, {1.0, 0.5}, 2, 0, cfg), ValidationError);
    CHECK_THROWS_AS(random_band_limited_kernel(box, 8, 0), ValidationError);
  }
}
