#pragma once

#include <string>
#include <vector>

namespace tcmc {

struct CriterionResult {
  int number = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;  // one "ok:"/"FAIL:" line per assertion
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int window = 8;           // witness window for the nonexistence suites
  unsigned threads = 0;     // 0 = hardware concurrency
  std::size_t random_sets = 1000;  // sample count for the constant-closure checks
};

// The acceptance suite: each criterion is a self-contained end-to-end check
// with pinned expected values; run them all for the paper-examples command.
CriterionResult run_criterion(int number, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_all_criteria(const AcceptanceOptions& opts = {});

std::string format_criterion_line(const CriterionResult& r);

}  // namespace tcmc
