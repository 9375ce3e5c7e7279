#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "marton/bounds.hpp"
#include "marton/experiment.hpp"
#include "marton/stats.hpp"

namespace marton {

// J(k, l) = A_k B_l C_kl with A_k ~ Bern(a), B_l ~ Bern(a) and C_kl ~ Bern(c),
// all independent. Then E J = a^2 c and E J(k,l) J(k,l') = a^3 c^2, which
// meets the lemma's moment conditions when a^2 c = alpha q and a c <= 1.
struct CoveringLaw {
  double a = 1.0;
  double c = 1.0;
  double mean() const { return a * a * c; }
  double pair_moment() const { return a * a * a * c * c; }
};

CoveringLaw synthetic_law(const CoveringParams& p);

// Z = 0 drawn exactly: A ~ Bin(r, a), B ~ Bin(s, a), then Z = 0 with
// probability (1 - c)^{AB}.
bool sample_empty(const CoveringLaw& law, std::size_t r, std::size_t s, SeededRng& rng);

// Materializes the r x s array; slow, for testing the exact sampler.
std::vector<std::uint8_t> sample_array(const CoveringLaw& law, std::size_t r, std::size_t s,
                                       SeededRng& rng);

struct CoveringResult {
  CoveringParams params;
  CoveringLaw law;
  double bound_raw = 0.0;
  double bound = 0.0;  // clamped to [0, 1]
  Estimate estimate;
  bool within_3sigma = true;
  bool violated = false;  // one-sided lower limit above the bound
};

CoveringResult synthetic_covering(const CoveringParams& p, std::size_t trials,
                                  std::uint64_t seed, bool parallel = true);

// Probability that a single r1 x r2 band of a real codebook holds no
// acceptable cell, against the band's covering bound.
struct BandCoveringResult {
  int r1 = 0;
  int r2 = 0;
  double bound_raw = 0.0;
  double bound = 0.0;
  Estimate estimate;
  bool within_3sigma = true;
  bool violated = false;
};

BandCoveringResult empirical_covering(const ClassicalInstance& inst, int r1, int r2,
                                      std::size_t trials, std::uint64_t seed,
                                      bool parallel = true);

}  // namespace marton
