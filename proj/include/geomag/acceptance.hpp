#pragma once

#include <functional>
#include <string>
#include <vector>

namespace geomag::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;

CriterionResult run_criterion(int id);

// Runs the listed criteria (all when empty) in order.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& progress = {});

}  // namespace geomag::acceptance
