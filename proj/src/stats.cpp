#include "marton/stats.hpp"

#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "marton/error.hpp"

namespace marton {

namespace {

// Quantile of Beta(a, b).
double beta_quantile(double a, double b, double p) { return boost::math::ibeta_inv(a, b, p); }

double lower_limit(std::uint64_t k, std::uint64_t n, double tail) {
  if (k == 0) return 0.0;
  return beta_quantile(static_cast<double>(k), static_cast<double>(n - k + 1), tail);
}

double upper_limit(std::uint64_t k, std::uint64_t n, double tail) {
  if (k == n) return 1.0;
  return beta_quantile(static_cast<double>(k + 1), static_cast<double>(n - k), 1.0 - tail);
}

}  // namespace

void clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence, double& lo, double& hi) {
  if (n == 0 || k > n) throw InvalidArgument("clopper_pearson needs 0 <= k <= n, n > 0");
  const double tail = (1.0 - confidence) / 2.0;
  lo = lower_limit(k, n, tail);
  hi = upper_limit(k, n, tail);
}

Estimate estimate(std::uint64_t successes, std::uint64_t trials) {
  Estimate e;
  e.successes = successes;
  e.trials = trials;
  if (trials == 0) return e;
  e.rate = static_cast<double>(successes) / static_cast<double>(trials);
  e.sigma = std::sqrt(e.rate * (1.0 - e.rate) / static_cast<double>(trials));
  clopper_pearson(successes, trials, 0.95, e.lower, e.upper);
  e.upper_one_sided = upper_limit(successes, trials, 0.05);
  e.lower_one_sided = lower_limit(successes, trials, 0.05);
  return e;
}

}  // namespace marton
