#include "marton/covering.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "marton/error.hpp"
#include "marton/rng.hpp"

namespace marton {

CoveringLaw synthetic_law(const CoveringParams& p) {
  covering_bound(p);
  if (p.q <= p.alpha) return CoveringLaw{p.alpha, p.q / p.alpha};
  return CoveringLaw{1.0, p.alpha * p.q};
}

namespace {

std::uint64_t binomial(std::size_t n, double a, SeededRng& rng) {
  if (a >= 1.0) return n;
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < n; ++i) k += rng.uniform() < a;
  return k;
}

template <class Body>
std::uint64_t count_hits(std::size_t trials, bool parallel, Body body) {
  std::vector<std::uint8_t> hit(trials, 0);
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      hit[static_cast<std::size_t>(t)] = body(static_cast<std::size_t>(t)) ? 1 : 0;
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  std::uint64_t k = 0;
  for (auto h : hit) k += h;
  return k;
}

void judge(double bound, const Estimate& est, bool& within, bool& violated) {
  const double b = std::clamp(bound, 0.0, 1.0);
  const double n = static_cast<double>(std::max<std::uint64_t>(est.trials, 1));
  const double sigma = std::max(est.sigma, std::sqrt(b * (1.0 - b) / n));
  within = est.rate <= bound + 3.0 * sigma;
  violated = est.lower_one_sided > bound;
}

}  // namespace

bool sample_empty(const CoveringLaw& law, std::size_t r, std::size_t s, SeededRng& rng) {
  const double A = static_cast<double>(binomial(r, law.a, rng));
  const double B = static_cast<double>(binomial(s, law.a, rng));
  if (A == 0 || B == 0) return true;
  if (law.c >= 1.0) return false;
  const double p_empty = std::exp(A * B * std::log1p(-law.c));
  return rng.uniform() < p_empty;
}

std::vector<std::uint8_t> sample_array(const CoveringLaw& law, std::size_t r, std::size_t s,
                                       SeededRng& rng) {
  std::vector<std::uint8_t> a(r), b(s), j(r * s);
  for (auto& x : a) x = rng.uniform() < law.a;
  for (auto& x : b) x = rng.uniform() < law.a;
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = 0; l < s; ++l) j[k * s + l] = a[k] && b[l] && rng.uniform() < law.c;
  return j;
}

CoveringResult synthetic_covering(const CoveringParams& p, std::size_t trials,
                                  std::uint64_t seed, bool parallel) {
  CoveringResult res;
  res.params = p;
  res.law = synthetic_law(p);
  res.bound_raw = covering_bound(p);
  res.bound = std::clamp(res.bound_raw, 0.0, 1.0);
  const auto r = static_cast<std::size_t>(p.r), s = static_cast<std::size_t>(p.s);
  const std::uint64_t k = count_hits(trials, parallel, [&](std::size_t t) {
    SeededRng rng(derive_stream(seed, t + 1), streams::kSynthetic);
    return sample_empty(res.law, r, s, rng);
  });
  res.estimate = estimate(k, trials);
  judge(res.bound_raw, res.estimate, res.within_3sigma, res.violated);
  return res;
}

BandCoveringResult empirical_covering(const ClassicalInstance& inst, int r1, int r2,
                                      std::size_t trials, std::uint64_t seed, bool parallel) {
  BandCoveringResult res;
  res.r1 = r1;
  res.r2 = r2;
  RateParams params = rate_params(inst, 0, 0, r1, r2, 0.0);
  res.bound_raw = event_bounds(params).e1;
  res.bound = std::clamp(res.bound_raw, 0.0, 1.0);
  const CodebookSpec spec{0, 0, r1, r2, inst.n, inst.i_inf.value};
  const std::uint64_t k = count_hits(trials, parallel, [&](std::size_t t) {
    Codebook cb(inst.design, spec, codebook_seed(seed, t, true));
    return encode(cb, 1, 1, *inst.evaluator, inst.eps0, 0).fallback;
  });
  res.estimate = estimate(k, trials);
  judge(res.bound_raw, res.estimate, res.within_3sigma, res.violated);
  return res;
}

}  // namespace marton
