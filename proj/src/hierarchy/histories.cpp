#include <string>

#include "elab/hierarchy.hpp"

namespace elab::hierarchy {

namespace {

void check_budget(int k, int j) {
  if (k < 1) throw ValidationError("history base order must be >= 1", "k");
  if (j < 1) throw ValidationError("history depth must be >= 1", "j");
  if (k + j > kHistoryBudget)
    throw ValidationError("k + j = " + std::to_string(k + j) + " exceeds the enumeration budget of " +
                          std::to_string(kHistoryBudget));
}

}  // namespace

bool CollisionHistory::admissible() const {
  if (static_cast<int>(mu.size()) != j) return false;
  for (int i = 0; i < j; ++i)
    if (mu[static_cast<std::size_t>(i)] < 1 || mu[static_cast<std::size_t>(i)] >= k + 1 + i) return false;
  return true;
}

bool CollisionHistory::nondecreasing() const {
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (mu[i] < mu[i - 1]) return false;
  return true;
}

void for_each_history(int k, int j, const std::function<void(const CollisionHistory&)>& visit) {
  check_budget(k, j);
  CollisionHistory h{k, j, std::vector<int>(static_cast<std::size_t>(j), 1)};
  // odometer: digit i ranges over 1 .. k + i
  for (;;) {
    visit(h);
    int i = j - 1;
    while (i >= 0 && h.mu[static_cast<std::size_t>(i)] == k + i) h.mu[static_cast<std::size_t>(i--)] = 1;
    if (i < 0) return;
    ++h.mu[static_cast<std::size_t>(i)];
  }
}

std::vector<CollisionHistory> enumerate_histories(int k, int j) {
  std::vector<CollisionHistory> out;
  out.reserve(static_cast<std::size_t>(history_count(k, j)));
  for_each_history(k, j, [&](const CollisionHistory& h) { out.push_back(h); });
  return out;
}

std::uint64_t history_count(int k, int j) {
  check_budget(k, j);
  std::uint64_t c = 1;
  for (int l = k + 1; l <= k + j; ++l) c *= static_cast<std::uint64_t>(l - 1);
  return c;
}

KmClassCount km_class_count(int k, int j) {
  KmClassCount out;
  for_each_history(k, j, [&](const CollisionHistory& h) {
    if (h.nondecreasing()) ++out.classes;
  });
  out.bound = std::uint64_t{1} << (k + 2 * j - 2);
  out.holds = out.classes <= out.bound;
  return out;
}

}  // namespace elab::hierarchy
