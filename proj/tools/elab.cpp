// elab: command-line driver for the experiment pipelines.

#include <iostream>

#include "CLI11.hpp"

#include "elab/acceptance.hpp"
#include "elab/error.hpp"
#include "elab/pipelines.hpp"

using namespace elab;
using namespace elab::lab;

namespace {

int finish(const RunOutcome& r) {
  for (const auto& e : r.checks.entries())
    std::cout << (e.passed ? "[PASS] " : "[FAIL] ") << e.name << (e.detail.empty() ? "" : ": " + e.detail) << "\n";
  std::cout << r.artifacts.size() << " artifact(s) written\n";
  if (r.exit_code() != 0) std::cerr << "some assertions failed; see failed_assertions.txt\n";
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the semiclassical mean-field limit"};
  app.require_subcommand(1);

  RunOptions opt;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string out;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "random seed");
  };
  auto gather = [&](CLI::App* sub) {
    if (sub->count("--threads")) opt.threads = threads;
    if (sub->count("--out")) opt.out = out;
    if (sub->count("--seed")) opt.seed = seed;
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the pipeline named in a config file");
  run->add_option("config", config_path, "JSON config")->required();
  common(run);

  auto* sweep = app.add_subcommand("sweep", "run the sweep block of a config file");
  sweep->add_option("config", config_path, "JSON config")->required();
  common(sweep);

  std::vector<int> only;
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");
  accept->add_option("--only", only, "criterion ids")->delimiter(',');
  common(accept);

  std::string kind;
  auto* probe = app.add_subcommand("probe", "collapsing-estimate probe or collision-history counts");
  probe->add_option("kind", kind, "collapsing | km")->required()->check(CLI::IsMember({"collapsing", "km"}));
  probe->add_option("--config", config_path, "JSON config with a probe block");
  common(probe);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || sweep->parsed()) {
      gather(run->parsed() ? run : sweep);
      auto cfg = apply_options(load_config(config_path), opt);
      if (sweep->parsed()) {
        if (cfg.sweep.hbar.empty() || cfg.sweep.N.empty())
          throw ValidationError("a sweep needs non-empty hbar and N lists", "sweep");
        cfg.pipeline = Pipeline::Sweep;
      }
      return finish(run_pipeline(cfg, std::cout));
    }
    if (accept->parsed()) {
      gather(accept);
      AcceptanceOptions a;
      a.threads = opt.threads.value_or(1);
      a.only = only;
      a.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
      const auto results = run_acceptance(a);
      int failed = 0;
      for (const auto& r : results) failed += !r.passed;
      std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed\n";
      return failed ? 2 : 0;
    }
    gather(probe);
    ExperimentConfig cfg = config_path.empty() ? parse_config(R"({"pipeline": "probe"})") : load_config(config_path);
    cfg.pipeline = Pipeline::Probe;
    cfg.probe.kind = kind;
    return finish(run_pipeline(apply_options(cfg, opt), std::cout));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
