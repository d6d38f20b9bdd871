#pragma once

// Property suite behind `gibbs-nls verify` and the acceptance binary. Each
// criterion is self-contained, deterministic for a given seed, and reports
// the numbers it compared alongside the verdict.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnls/kernels.hpp"

namespace gnls {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json data;
  double seconds = 0;
};

struct SuiteOptions {
  std::uint64_t seed = 20240917;
  Exec exec = Exec::parallel;
  /// Multiplies sample and trajectory counts; 1 is the full-size suite.
  double scale = 1.0;
};

CheckResult check_hessian_oracle(const SuiteOptions& o);        // 1
CheckResult check_inequalities(const SuiteOptions& o);          // 2
CheckResult check_linear_sector(const SuiteOptions& o);         // 3
CheckResult check_gibbs_stationarity(const SuiteOptions& o);    // 4
CheckResult check_certificate_golden(const SuiteOptions& o);    // 5
CheckResult check_lambda_scaling(const SuiteOptions& o);        // 6
CheckResult check_witten_formula(const SuiteOptions& o);        // 7
CheckResult check_witten_consistency(const SuiteOptions& o);    // 8
CheckResult check_end_to_end(const SuiteOptions& o);            // 9

inline constexpr int kCriteria = 9;

/// Runs criterion id (1..9), timing it and turning exceptions into failures.
CheckResult run_criterion(int id, const SuiteOptions& o);

/// Runs the selected criteria (all when empty); on_result is called after each.
std::vector<CheckResult> run_suite(const SuiteOptions& o, const std::vector<int>& ids = {},
                                   const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace gnls
