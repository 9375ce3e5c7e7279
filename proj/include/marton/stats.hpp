#pragma once

#include <cstdint>

namespace marton {

// Binomial proportion with exact Clopper-Pearson limits.
struct Estimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double sigma = 0.0;          // sqrt(rate (1 - rate) / trials)
  double lower = 0.0;          // two-sided 95%
  double upper = 1.0;
  double upper_one_sided = 1.0;  // 95%
  double lower_one_sided = 0.0;
};

Estimate estimate(std::uint64_t successes, std::uint64_t trials);

// Two-sided Clopper-Pearson interval at the given confidence.
void clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence, double& lo, double& hi);

}  // namespace marton
