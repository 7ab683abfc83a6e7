#include <cmath>
#include <numbers>

#include "elab/scene.hpp"

namespace elab::scenes {

namespace {

using std::numbers::pi;

Field gaussian_density(const BoxSpec& box, double s, double c) {
  return Field::from_function(box, [&](const Point& x) {
    return cplx(std::exp(-(x[0] - c) * (x[0] - c) / (2 * s * s)) / std::sqrt(2 * pi * s * s));
  });
}

// u = sign * 0.3 sin(k x), S = -sign * (0.3 / k) cos(k x), so S' = u.
void sine_flow(Scene& sc, double sign) {
  const double k = 2 * pi / sc.box.L;
  sc.u_in = VectorField(sc.box);
  sc.u_in[0] = Field::from_function(sc.box, [&](const Point& x) { return cplx(sign * 0.3 * std::sin(k * x[0])); });
  sc.S = Field::from_function(sc.box, [&](const Point& x) { return cplx(-sign * 0.3 / k * std::cos(k * x[0])); });
}

}  // namespace

const std::vector<std::string>& scene_names() {
  static const std::vector<std::string> names{"expanding", "compressive", "audit", "transport"};
  return names;
}

Scene make_scene(const std::string& name, int n, double hbar, const PotentialSpec& potential) {
  Scene sc;
  sc.name = name;
  sc.box = BoxSpec::make(1, kSceneL, n);
  sc.potential = gaussian_potential(sc.box, potential.width, potential.amplitude);
  if (name == "expanding" || name == "compressive" || name == "audit") {
    sc.rho_in = gaussian_density(sc.box, 0.5, 0.0);
    sine_flow(sc, name == "compressive" ? -1.0 : 1.0);
    sc.phi_rho = name == "audit" ? gaussian_density(sc.box, 0.45, 0.1) : sc.rho_in;
    return sc;
  }
  if (name == "transport") {
    if (!(hbar > 0.0)) throw ValidationError("hbar must be positive", "scales.hbar");
    sc.interacting = false;
    sc.rho_in = Field::constant(sc.box, 1.0 / sc.box.L);
    sc.phi_rho = sc.rho_in;
    const double quantum = 2 * pi * hbar / sc.box.L;
    const double c = quantum * std::max(1.0, std::round(0.3 / quantum));
    sc.u_in = VectorField(sc.box);
    sc.u_in[0] = Field::constant(sc.box, c);
    sc.S = Field::from_function(sc.box, [&](const Point& x) { return cplx(c * x[0]); });
    return sc;
  }
  throw ValidationError("unknown scene '" + name + "'", "scene.name");
}

}  // namespace elab::scenes
