#pragma once

// Named initial-data recipes shared by the coupled runs, the sweep and the
// acceptance suite. Every recipe lives on a one-dimensional box.

#include <string>
#include <vector>

#include "elab/grid.hpp"
#include "elab/potentials.hpp"

namespace elab::scenes {

struct Scene {
  std::string name;
  BoxSpec box;
  Potential potential;
  bool interacting = true;  // false: V = 0 and b0 = 0 on both sides
  Field rho_in;             // Euler density
  VectorField u_in;         // Euler velocity
  Field phi_rho;            // density lifted into phi
  Field S;                  // phase of phi
  double T = 0.5;
};

/// Default box edge and interaction of the recipes.
inline constexpr double kSceneL = 8.0;
inline constexpr double kPotentialWidth = 0.5;
inline constexpr double kPotentialAmplitude = 2.0;

/// Gaussian interaction profile used by the scenes.
struct PotentialSpec {
  double width = kPotentialWidth;
  double amplitude = kPotentialAmplitude;
};

/// Recipes:
///   expanding    Gaussian rho (s = 0.5), u = +0.3 sin(2 pi x / L), phi the WKB lift
///   compressive  same density, u = -0.3 sin(2 pi x / L)
///   audit        expanding flow, but phi lifts a shifted, narrower Gaussian
///                (s = 0.45, centre 0.1) so every term of dM/dt is active
///   transport    V = 0, rho = 1/L, u the box mode nearest 0.3 compatible
///                with a periodic phase
/// `hbar` only matters for `transport`.
Scene make_scene(const std::string& name, int n, double hbar = 0.1, const PotentialSpec& potential = {});
const std::vector<std::string>& scene_names();

}  // namespace elab::scenes
