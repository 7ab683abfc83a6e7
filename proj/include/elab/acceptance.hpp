#pragma once

#include <functional>
#include <string>
#include <vector>

namespace elab::lab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // a criterion also fails when it runs over
};

struct AcceptanceOptions {
  int threads = 1;
  std::vector<int> only;  // empty: all twelve
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

/// "[PASS] 3 modulated-energy identity (41.2 s, budget 120 s): ..."
std::string format_result(const CriterionResult& r);

}  // namespace elab::lab
