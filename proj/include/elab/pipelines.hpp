#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elab/config.hpp"
#include "elab/grid.hpp"

namespace elab::lab {

/// Command-line overrides of the config.
struct RunOptions {
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

/// Named assertions of one run. Failures never abort the run.
class Checklist {
 public:
  struct Entry {
    std::string name;
    bool passed = false;
    std::string detail;
  };

  bool check(const std::string& name, bool passed, const std::string& detail = {});
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<Entry> failures() const;

 private:
  std::vector<Entry> entries_;
};

struct RunOutcome {
  Checklist checks;
  std::vector<std::string> artifacts;

  /// 0 when every assertion held, 2 otherwise.
  int exit_code() const { return checks.failures().empty() ? 0 : 2; }
};

/// |int |(i hbar grad + u) phi|^2 - hbar^2 ||grad sqrt(rho)||^2| / hbar^2 ||grad sqrt(rho)||^2,
/// zero for phi = sqrt(rho) e^{iS/hbar} with u = grad S.
double wkb_identity_defect(const Field& phi, const Field& u, const Field& rho, double hbar);

ExperimentConfig apply_options(ExperimentConfig cfg, const RunOptions& opt);

/// Runs the configured pipeline, writes its artifacts under cfg.output and,
/// when an assertion failed, a manifest failed_assertions.txt listing them.
RunOutcome run_pipeline(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace elab::lab
