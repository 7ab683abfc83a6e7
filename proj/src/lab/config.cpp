#include "elab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "elab/hierarchy.hpp"
#include "elab/nbody.hpp"

namespace elab::lab {

namespace {

using json = nlohmann::json;

// A JSON object together with its path from the document root.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("expected an object", path_.empty() ? "<root>" : path_);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  void only(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!allowed.count(k)) throw ValidationError("unknown field", at(k));
  }

  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    return get<T>(key);
  }

  template <class T>
  T get(const std::string& key) const {
    if (!has(key)) throw ValidationError("missing field", at(key));
    const auto& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError("expected true or false", at(key));
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError("expected a string", at(key));
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ValidationError("expected an integer", at(key));
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ValidationError("expected a number", at(key));
    }
    return v.get<T>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ValidationError("expected a non-empty list of numbers", at(key));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ValidationError("expected a number", at(key) + "[" + std::to_string(i) + "]");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Node child(const std::string& key) const { return Node(j_.at(key), at(key)); }

 private:
  const json& j_;
  std::string path_;
};

Pipeline pipeline_from(const std::string& s) {
  for (auto p : {Pipeline::Hnls, Pipeline::Euler, Pipeline::Coupled, Pipeline::NBody, Pipeline::Probe, Pipeline::Sweep,
                 Pipeline::Acceptance})
    if (to_string(p) == s) return p;
  throw ValidationError("unknown pipeline '" + s + "'", "pipeline");
}

bool uses_scene(Pipeline p) {
  return p == Pipeline::Hnls || p == Pipeline::Euler || p == Pipeline::Coupled || p == Pipeline::Sweep;
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("must be positive", path);
}

scenes::PotentialSpec parse_potential(const Node& p) {
  p.only({"width", "amplitude", "b0"});
  scenes::PotentialSpec out;
  out.width = p.get<double>("width", out.width);
  require_positive(out.width, p.at("width"));
  if (p.has("amplitude") && p.has("b0")) throw ValidationError("give either amplitude or b0, not both", p.at("b0"));
  // int a exp(-x^2/w^2) dx = a w sqrt(pi) in d = 1
  const double mass = out.width * std::sqrt(std::numbers::pi);
  const std::string key = p.has("b0") ? "b0" : "amplitude";
  const double b0 = p.has("b0") ? p.get<double>("b0") : p.get<double>("amplitude", out.amplitude) * mass;
  if (b0 < 0.0)
    throw ValidationError("b0 = int V = " + std::to_string(b0) +
                              " < 0: a focusing interaction makes the limiting Euler system non-hyperbolic",
                          p.at(key));
  if (b0 == 0.0) throw ValidationError("b0 = 0: use the transport scene for the non-interacting case", p.at(key));
  out.amplitude = b0 / mass;
  return out;
}

void check_resolution(const ExperimentConfig& c, double N) {
  const auto pot = gaussian_potential(c.box, c.potential.width, c.potential.amplitude);
  const int need = required_points(pot, c.box.L, N, c.scales.beta);
  if (c.box.n < need)
    throw ValidationError("n = " + std::to_string(c.box.n) + " does not resolve V_N at N = " + std::to_string(N) +
                              " (needs n >= " + std::to_string(need) + ")",
                          "box.n");
}

}  // namespace

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Hnls: return "hnls";
    case Pipeline::Euler: return "euler";
    case Pipeline::Coupled: return "coupled";
    case Pipeline::NBody: return "nbody";
    case Pipeline::Probe: return "probe";
    case Pipeline::Sweep: return "sweep";
    case Pipeline::Acceptance: return "acceptance";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.only({"pipeline", "scene", "scales", "potential", "box", "solver", "sweep", "nbody", "probe", "output", "seed",
             "threads"});

  ExperimentConfig c;
  c.pipeline = pipeline_from(root.get<std::string>("pipeline"));
  c.scene = root.get<std::string>("scene", c.scene);
  {
    const auto& names = scenes::scene_names();
    if (std::find(names.begin(), names.end(), c.scene) == names.end())
      throw ValidationError("unknown scene '" + c.scene + "'", "scene");
  }
  c.output = root.get<std::string>("output", c.output);
  if (root.has("seed")) {
    const auto s = root.get<std::int64_t>("seed");
    if (s < 0) throw ValidationError("must be >= 0", "seed");
    c.seed = static_cast<std::uint64_t>(s);
  }
  c.threads = root.get<int>("threads", c.threads);
  if (c.threads < 1) throw ValidationError("must be >= 1", "threads");

  if (root.has("scales")) {
    const auto s = root.child("scales");
    s.only({"hbar", "N", "beta", "d"});
    const int d = s.get<int>("d", 1);
    if (d != 1) throw ValidationError("only d = 1 experiments are implemented", "scales.d");
    c.scales = PhysicalScales::make(s.get<double>("hbar", c.scales.hbar), s.get<double>("N", c.scales.N),
                                    s.get<double>("beta", c.scales.beta), d);
  }
  if (root.has("potential")) c.potential = parse_potential(root.child("potential"));

  const double L = c.pipeline == Pipeline::NBody ? 6.0 : scenes::kSceneL;
  const int default_n = c.pipeline == Pipeline::NBody ? 32 : 256;
  c.box = BoxSpec::make(1, L, default_n);
  if (root.has("box")) {
    const auto b = root.child("box");
    b.only({"d", "L", "n"});
    if (b.get<int>("d", 1) != 1) throw ValidationError("only d = 1 boxes are implemented", "box.d");
    if (b.has("L") && b.get<double>("L") != L) {
      std::ostringstream msg;
      msg << "this pipeline runs on a box of edge " << L;
      throw ValidationError(msg.str(), "box.L");
    }
    const int n = b.get<int>("n", default_n);
    if (n < 8 || (n & (n - 1)) != 0) throw ValidationError("must be a power of two >= 8", "box.n");
    c.box = BoxSpec::make(1, L, n);
  }

  if (root.has("solver")) {
    const auto s = root.child("solver");
    s.only({"dt", "T", "every", "euler_n"});
    c.solver.dt = s.get<double>("dt", c.solver.dt);
    c.solver.T = s.get<double>("T", c.solver.T);
    c.solver.every = s.get<int>("every", c.solver.every);
    c.solver.euler_n = s.get<int>("euler_n", c.solver.euler_n);
    require_positive(c.solver.dt, "solver.dt");
    require_positive(c.solver.T, "solver.T");
    if (c.solver.every < 1) throw ValidationError("must be >= 1", "solver.every");
    if (c.solver.euler_n < 8 || (c.solver.euler_n & (c.solver.euler_n - 1)) != 0)
      throw ValidationError("must be a power of two >= 8", "solver.euler_n");
  }

  if (root.has("sweep")) {
    const auto s = root.child("sweep");
    s.only({"hbar", "N", "beta", "mode", "T", "snapshots"});
    c.sweep.hbar = s.numbers("hbar", {});
    c.sweep.N = s.numbers("N", {});
    c.sweep.beta = s.get<double>("beta", c.scales.beta);
    c.sweep.T = s.get<double>("T", c.sweep.T);
    c.sweep.snapshots = s.get<int>("snapshots", c.sweep.snapshots);
    const auto mode = s.get<std::string>("mode", "grid");
    if (mode != "grid" && mode != "diagonal") throw ValidationError("expected \"grid\" or \"diagonal\"", "sweep.mode");
    c.sweep.diagonal = mode == "diagonal";
    for (std::size_t i = 0; i < c.sweep.hbar.size(); ++i)
      require_positive(c.sweep.hbar[i], "sweep.hbar[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < c.sweep.N.size(); ++i)
      if (!(c.sweep.N[i] >= 2.0)) throw ValidationError("must be >= 2", "sweep.N[" + std::to_string(i) + "]");
    if (!(c.sweep.beta > 0.0 && c.sweep.beta < 1.0)) throw ValidationError("beta must lie in (0, 1)", "sweep.beta");
    require_positive(c.sweep.T, "sweep.T");
    if (c.sweep.snapshots < 2) throw ValidationError("must be >= 2", "sweep.snapshots");
    if (c.sweep.diagonal && c.sweep.hbar.size() != c.sweep.N.size())
      throw ValidationError("diagonal sweeps pair hbar[i] with N[i]; the lists differ in length", "sweep.N");
    // the report header takes beta from scales
    c.scales = PhysicalScales::make(c.scales.hbar, c.scales.N, c.sweep.beta, 1);
  }
  if (c.pipeline == Pipeline::Sweep && (c.sweep.hbar.empty() || c.sweep.N.empty()))
    throw ValidationError("a sweep needs non-empty hbar and N lists", "sweep");

  if (root.has("nbody")) {
    const auto s = root.child("nbody");
    s.only({"N", "interacting"});
    c.nbody.N = s.get<int>("N", c.nbody.N);
    c.nbody.interacting = s.get<bool>("interacting", c.nbody.interacting);
    if (c.nbody.N != 2 && c.nbody.N != 3) throw ValidationError("particle number must be 2 or 3", "nbody.N");
  }
  if (c.pipeline == Pipeline::NBody) nbody::check_memory(c.box, c.nbody.N);

  if (root.has("probe")) {
    const auto s = root.child("probe");
    s.only({"kind", "hbar_grid", "samples", "T_probe", "n", "band", "k_max", "j_max"});
    auto& p = c.probe;
    p.kind = s.get<std::string>("kind", p.kind);
    if (p.kind != "collapsing" && p.kind != "km") throw ValidationError("expected \"collapsing\" or \"km\"", "probe.kind");
    p.hbar_grid = s.numbers("hbar_grid", p.hbar_grid);
    if (p.hbar_grid.size() < 3) throw ValidationError("the exponent fit needs >= 3 values", "probe.hbar_grid");
    for (std::size_t i = 0; i < p.hbar_grid.size(); ++i)
      require_positive(p.hbar_grid[i], "probe.hbar_grid[" + std::to_string(i) + "]");
    p.samples = s.get<int>("samples", p.samples);
    if (p.samples < 1) throw ValidationError("must be >= 1", "probe.samples");
    p.T_probe = s.get<double>("T_probe", p.T_probe);
    require_positive(p.T_probe, "probe.T_probe");
    p.n = s.get<int>("n", p.n);
    if (p.n < 8 || p.n > 32 || (p.n & (p.n - 1)) != 0) throw ValidationError("must be 8, 16 or 32", "probe.n");
    p.band = s.get<int>("band", p.band);
    if (p.band < 0 || 2 * p.band >= p.n) throw ValidationError("must satisfy 0 <= 2 band < n", "probe.band");
    p.k_max = s.get<int>("k_max", p.k_max);
    p.j_max = s.get<int>("j_max", p.j_max);
    if (p.k_max < 1 || p.j_max < 1 || p.k_max + p.j_max > hierarchy::kHistoryBudget)
      throw ValidationError("need k_max, j_max >= 1 and k_max + j_max <= " + std::to_string(hierarchy::kHistoryBudget),
                            "probe.j_max");
  }

  if (c.pipeline == Pipeline::Hnls || c.pipeline == Pipeline::Coupled) {
    if (c.scene != "transport") check_resolution(c, c.scales.N);
  }
  if (!uses_scene(c.pipeline) && root.has("scene"))
    throw ValidationError("pipeline '" + to_string(c.pipeline) + "' takes no scene", "scene");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace elab::lab
