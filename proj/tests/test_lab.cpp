#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "elab/config.hpp"
#include "elab/pipelines.hpp"
#include "elab/rate_fit.hpp"
#include "elab/report.hpp"

using namespace elab;
using namespace elab::lab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("elab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string path_of(const std::string& json_text) {
  try {
    parse_config(json_text);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<accepted>";
}

RunOutcome run_quiet(const ExperimentConfig& cfg) {
  std::ostringstream log;
  return run_pipeline(cfg, log);
}

}  // namespace

TEST_CASE("rate fits") {
  SUBCASE("exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double x : {1.0, 2.0, 4.0, 8.0}) pts.emplace_back(x, x * x);
    const auto f = fit_rate(pts);
    CHECK(std::abs(f.slope - 2.0) < 1e-12);
    CHECK(f.r_squared == doctest::Approx(1.0));
  }
  SUBCASE("constant") {
    const auto f = fit_rate({{1, 3}, {2, 3}, {5, 3}});
    CHECK(std::abs(f.slope) < 1e-12);
  }
  SUBCASE("noisy 1.5 law") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 8; ++i) {
      const double x = std::pow(2.0, i);
      pts.emplace_back(x, std::pow(x, 1.5) * (1 + noise(rng)));
    }
    const auto f = fit_rate(pts);
    CHECK(f.slope == doctest::Approx(1.5).epsilon(0.05 / 1.5));
    CHECK(f.points.size() == 8);
  }
  CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 2}}), ValidationError);
  CHECK_THROWS_AS(fit_rate({{1, 1}, {2, 0}, {3, 1}}), ValidationError);
}

TEST_CASE("config validation names the offending field") {
  CHECK(path_of(R"({"scene": "expanding"})") == "pipeline");
  CHECK(path_of(R"({"pipeline": "hnls", "colour": 1})") == "colour");
  CHECK(path_of(R"({"pipeline": "hnls", "scales": {"hbar": -1}})") == "scales.hbar");
  CHECK(path_of(R"({"pipeline": "hnls", "scales": {"hbar": "big"}})") == "scales.hbar");
  CHECK(path_of(R"({"pipeline": "hnls", "box": {"n": 100}})") == "box.n");
  CHECK(path_of(R"({"pipeline": "hnls", "box": {"L": 5}})") == "box.L");
  CHECK(path_of(R"({"pipeline": "hnls", "scene": "vortex"})") == "scene");
  CHECK(path_of(R"({"pipeline": "sweep", "sweep": {"hbar": [], "N": [16]}})") == "sweep.hbar");
  CHECK(path_of(R"({"pipeline": "sweep", "sweep": {"hbar": [0.1, 0.2], "N": [16], "mode": "diagonal"}})") ==
        "sweep.N");
  CHECK(path_of(R"({"pipeline": "nbody", "nbody": {"N": 4}})") == "nbody.N");
  CHECK(path_of(R"({"pipeline": "probe", "probe": {"hbar_grid": [1, 0.5]}})") == "probe.hbar_grid");
  CHECK(path_of(R"({"pipeline": "hnls", "solver": {"every": 0}})") == "solver.every");
  CHECK(path_of(R"({"pipeline": "euler", "solver": {"dt": 0}})") == "solver.dt");
  CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
}

TEST_CASE("focusing interactions are rejected") {
  try {
    parse_config(R"({"pipeline": "coupled", "potential": {"b0": -0.5}})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.path() == "potential.b0");
    CHECK(std::string(e.what()).find("non-hyperbolic") != std::string::npos);
  }
  CHECK(path_of(R"({"pipeline": "coupled", "potential": {"amplitude": -2}})") == "potential.amplitude");
  CHECK(path_of(R"({"pipeline": "coupled", "scales": {"N": 16}, "potential": {"b0": 1.0}})") == "<accepted>");
}

TEST_CASE("resolution rule is checked against the box") {
  try {
    parse_config(R"({"pipeline": "hnls", "scales": {"hbar": 0.2, "N": 1e6, "beta": 0.5}, "box": {"n": 256}})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.path() == "box.n");
    CHECK(std::string(e.what()).find("needs n >= 65536") != std::string::npos);
  }
  const auto c = parse_config(R"({"pipeline": "hnls", "scales": {"hbar": 0.2, "N": 16}, "box": {"n": 256}})");
  CHECK(c.box.n == 256);
  CHECK(c.box.L == 8.0);
}

TEST_CASE("CSV follows RFC 4180") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CsvTable t({"x", "note"});
  t.add_row(std::vector<std::string>{"1", "a,b"});
  t.add_row(std::vector<double>{0.1, 2.0});
  CHECK(t.str() == "x,note\r\n1,\"a,b\"\r\n0.1,2\r\n");
  CHECK_THROWS_AS(t.add_row(std::vector<std::string>{"only one"}), ValidationError);
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_number(std::exp(1.0))) == std::exp(1.0));
}

TEST_CASE("gnuplot script references the table") {
  CsvTable t({"hbar", "err"});
  const auto gp = gnuplot_script("sweep.csv", t.columns(), PlotSpec{"errors", "", "", 1, {2}, true, true});
  CHECK(gp.find("set datafile separator \",\"") != std::string::npos);
  CHECK(gp.find("plot \"sweep.csv\" using 1:2") != std::string::npos);
  CHECK(gp.find("set logscale y") != std::string::npos);
  CHECK_THROWS_AS(gnuplot_script("x.csv", t.columns(), PlotSpec{"", "", "", 1, {3}}), ValidationError);
}

TEST_CASE("hnls pipeline records the theorem regime in its header") {
  const auto dir = scratch("hnls");
  auto cfg = parse_config(R"({"pipeline": "hnls", "scales": {"hbar": 0.3, "N": 4, "beta": 0.7},
                              "solver": {"dt": 1e-3, "T": 0.1, "every": 10}})");
  cfg.output = dir.string();
  CHECK_FALSE(cfg.theorem_regime());
  const auto r = run_quiet(cfg);
  CHECK(r.exit_code() == 0);
  const auto side = nlohmann::json::parse(slurp(dir / "hnls_trajectory.json"));
  const auto& h = side.at("header");
  for (const char* key : {"hbar", "N", "beta", "d", "n", "L", "dt", "git_describe", "theorem_regime"})
    CHECK(h.contains(key));
  CHECK(h.at("theorem_regime") == false);
  CHECK(h.at("beta") == 0.7);
  CHECK(side.at("summary").contains("restriction"));
  CHECK(fs::exists(dir / "hnls_trajectory.csv"));
  CHECK(fs::exists(dir / "hnls_trajectory.gp"));
  CHECK_FALSE(fs::exists(dir / "failed_assertions.txt"));
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
  const std::string text = R"({"pipeline": "sweep", "scene": "compressive",
      "sweep": {"hbar": [0.3, 0.2], "N": [16, 64], "beta": 0.5, "T": 0.1, "snapshots": 10}})";
  std::string first;
  for (int threads : {1, 1, 2}) {
    const auto dir = scratch("sweep" + std::to_string(threads));
    auto cfg = parse_config(text);
    cfg.output = dir.string();
    cfg.threads = threads;
    const auto r = run_quiet(cfg);
    CHECK(r.exit_code() == 0);
    const auto csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("hbar,N,beta,T,err_density_L2,err_momentum_L1,err_momentum_L54,err_pressure_L1,M0,Mmax,Cstar,"
                    "certified_T\r\n",
                    0) == 0);
    if (first.empty()) first = csv;
    CHECK(csv == first);
  }
}

TEST_CASE("a failed assertion exits 2 with a manifest") {
  // a compressive flow steepens until the regularity monitor stops it
  const auto dir = scratch("partial");
  auto cfg = parse_config(R"({"pipeline": "euler", "scene": "compressive", "box": {"n": 128},
                              "solver": {"dt": 0.01, "T": 20, "every": 50}})");
  cfg.output = dir.string();
  const auto r = run_quiet(cfg);
  CHECK(r.exit_code() == 2);
  const auto manifest = slurp(dir / "failed_assertions.txt");
  CHECK(manifest.find("reached horizon") != std::string::npos);
  CHECK(fs::exists(dir / "euler_trajectory.csv"));
}

TEST_CASE("probe pipelines") {
  SUBCASE("km table") {
    const auto dir = scratch("km");
    auto cfg = parse_config(R"({"pipeline": "probe", "probe": {"kind": "km", "k_max": 3, "j_max": 3}})");
    cfg.output = dir.string();
    CHECK(run_quiet(cfg).exit_code() == 0);
    const auto csv = slurp(dir / "km_counts.csv");
    CHECK(csv.find("1,2,2,2,2,8\r\n") != std::string::npos);
  }
  SUBCASE("collapsing report") {
    const auto dir = scratch("collapsing");
    auto cfg = parse_config(R"({"pipeline": "probe", "seed": 9, "probe": {"samples": 2, "hbar_grid": [1, 0.5, 0.25]}})");
    cfg.output = dir.string();
    CHECK(run_quiet(cfg).exit_code() == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "collapsing_probe.json"));
    for (const char* key : {"d", "alpha", "hbar_grid", "max_ratio_per_hbar", "fitted_exponent", "samples", "seed"})
      CHECK(doc.contains(key));
    CHECK(doc.at("alpha") == 1.5);
    CHECK(doc.at("seed") == 9);
  }
}

TEST_CASE("command-line overrides") {
  auto cfg = parse_config(R"({"pipeline": "probe", "seed": 1, "threads": 1})");
  RunOptions o;
  o.seed = 5;
  o.threads = 3;
  o.out = "elsewhere";
  cfg = apply_options(cfg, o);
  CHECK(cfg.seed == 5);
  CHECK(cfg.threads == 3);
  CHECK(cfg.output == "elsewhere");
  o.threads = 0;
  CHECK_THROWS_AS(apply_options(cfg, o), ValidationError);
}
