#pragma once

// Collision operators on reduced density kernels, enumeration of collision
// histories, and a numerical probe of the hbar-weighted collapsing bound.

#include <cstdint>
#include <functional>
#include <vector>

#include "elab/kernel.hpp"

namespace elab::hierarchy {

using nbody::DensityKernel;

enum class CollisionSign { Plus, Minus, Commutator };

/// Contracts x_{k+1} = x'_{k+1} against V(x_j - x_{k+1}) (Plus), against
/// V(x'_j - x_{k+1}) (Minus), or returns Plus - Minus. Order k+1 -> k,
/// 1 <= j <= k. `v` is sampled on the one-particle box; differences wrap.
DensityKernel collision_apply(const DensityKernel& g, const Field& v, int j, CollisionSign sign);

/// mu maps {k+1, ..., k+j} into {1, ..., k+j-1}; mu[i] is mu(k+1+i).
struct CollisionHistory {
  int k = 1;
  int j = 1;
  std::vector<int> mu;

  /// mu(l) < l for every l.
  bool admissible() const;
  bool nondecreasing() const;
};

constexpr int kHistoryBudget = 12;

/// Visits every admissible map in lexicographic order of (mu(k+1), ...).
void for_each_history(int k, int j, const std::function<void(const CollisionHistory&)>& visit);
std::vector<CollisionHistory> enumerate_histories(int k, int j);
/// (k + j - 1)! / (k - 1)!.
std::uint64_t history_count(int k, int j);

struct KmClassCount {
  std::uint64_t classes = 0;  // value-nondecreasing admissible maps
  std::uint64_t bound = 0;    // 2^{k + 2j - 2}
  bool holds = false;
};
KmClassCount km_class_count(int k, int j);

struct CollapsingProbeConfig {
  int n = 16;               // one-particle grid
  double L = 6.283185307179586;
  int band = 1;             // |m| <= band; at L = 2 pi this keeps hbar |xi| <= 1 for hbar <= 1
  double T_probe = 1.0;     // L2_t window [0, T_probe]
  int time_samples = 32;    // midpoint rule
  CollisionSign sign = CollisionSign::Plus;
  int threads = 1;
};

struct CollapsingProbeReport {
  int d = 1;
  double alpha = 1.5;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> hbar_grid;
  std::vector<std::vector<double>> ratios;  // [hbar][sample]
  std::vector<double> max_ratio_per_hbar;
  /// Slope of log(max ratio) against log(1/hbar).
  double fitted_exponent = 0.0;
};

/// Order-2 kernel with independent Gaussian Fourier coefficients on
/// |m| <= band in each of the four variables.
DensityKernel random_band_limited_kernel(const BoxSpec& box, int band, std::uint64_t seed);

/// ||S B_hbar U_hbar(t) f||_{L2_t([0,T]) L2} / (||V||_{L1} hbar^{-alpha} ||S f||_{L2});
/// 0 when f = 0.
double collapsing_ratio(const DensityKernel& f, const Field& v, double hbar, const CollapsingProbeConfig& cfg);

/// Sample i uses seed + i, so the report is independent of cfg.threads.
CollapsingProbeReport collapsing_probe(const Field& v, const std::vector<double>& hbar_grid, int samples,
                                       std::uint64_t seed, const CollapsingProbeConfig& cfg = {});

}  // namespace elab::hierarchy
