#pragma once

// JSON experiment configuration. Schema (every block optional unless noted):
//
//   pipeline   "hnls" | "euler" | "coupled" | "nbody" | "probe" | "sweep" | "acceptance"   (required)
//   scene      "expanding" | "compressive" | "audit" | "transport"
//   scales     {hbar, N, beta, d}
//   potential  {width, amplitude} or {width, b0}; b0 = int V must be >= 0
//   box        {d, L, n}; L must equal the pipeline's box edge
//   solver     {dt, T, every, euler_n}
//   sweep      {hbar: [..], N: [..], beta, mode: "grid" | "diagonal", T, snapshots}
//   nbody      {N, interacting}
//   probe      {kind: "collapsing" | "km", hbar_grid: [..], samples, T_probe, n, band, k_max, j_max}
//   output     directory for artifacts
//   seed, threads
//
// Errors carry the JSON path of the offending field.

#include <cstdint>
#include <string>
#include <vector>

#include "elab/potentials.hpp"
#include "elab/scene.hpp"

namespace elab::lab {

enum class Pipeline { Hnls, Euler, Coupled, NBody, Probe, Sweep, Acceptance };

std::string to_string(Pipeline p);

struct SolverSpec {
  double dt = 1e-3;
  double T = 0.5;
  int every = 10;
  int euler_n = 512;
};

struct SweepSpec {
  std::vector<double> hbar;
  std::vector<double> N;
  double beta = 0.5;
  bool diagonal = false;  // zip hbar[i] with N[i] instead of the full grid
  double T = 0.5;
  int snapshots = 50;
};

struct NBodySpec {
  int N = 2;
  bool interacting = true;
};

struct ProbeSpec {
  std::string kind = "collapsing";
  std::vector<double> hbar_grid{1.0, 0.5, 0.25, 0.125};
  int samples = 50;
  double T_probe = 1.0;
  int n = 16;
  int band = 1;
  int k_max = 4;
  int j_max = 6;
};

struct ExperimentConfig {
  Pipeline pipeline = Pipeline::Hnls;
  std::string scene = "expanding";
  PhysicalScales scales = PhysicalScales::make(0.1, 1e6, 0.5, 1);
  scenes::PotentialSpec potential;
  BoxSpec box = BoxSpec::make(1, scenes::kSceneL, 256);
  SolverSpec solver;
  SweepSpec sweep;
  NBodySpec nbody;
  ProbeSpec probe;
  std::string output = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  /// beta < 2/5. Outside it runs proceed and every report says so.
  bool theorem_regime() const noexcept { return scales.theorem_regime(); }
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace elab::lab
