#pragma once

#include "chabauty/serialize.hpp"

#include <string>
#include <vector>

namespace chabauty {

struct SuiteResult {
  std::string name;
  std::string model;
  bool passed = true;
  int checks = 0;
  int failures = 0;
  double max_residual = 0.0;
  std::string detail;  ///< first failure
};

/// Invariant suites of every module for one model; `trials` scales the randomized draws.
std::vector<SuiteResult> run_verify_suites(const GroupModel& model, const Tolerances& tol, std::uint64_t seed,
                                           int trials);
Json suite_to_json(const SuiteResult& s);

}  // namespace chabauty
