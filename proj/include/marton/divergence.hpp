#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "marton/pmf.hpp"
#include "marton/quantum.hpp"

namespace marton {

// Mass comparisons against 1 - eps use this absolute slack.
inline constexpr double kConstraintSlack = 1e-12;
// Support size limit for the exact subset search.
inline constexpr std::size_t kExhaustiveCellLimit = 24;
// LLR atoms closer than this (bits) are merged.
inline constexpr double kLlrResolution = 1e-9;
inline constexpr std::size_t kDefaultAtomCap = 1'000'000;

enum class I0Method { greedy, exhaustive, randomized };

std::string to_string(I0Method m);
I0Method parse_i0_method(const std::string& s);

// A (possibly fractional) set of joint-alphabet cells, indexed r * cols + c.
// `cells` are included with weight 1; `boundary_cell`, when present, with
// `boundary_weight` in [0, 1].
struct SetWitness {
  std::vector<std::size_t> cells;
  std::optional<std::size_t> boundary_cell;
  double boundary_weight = 0.0;
};

// Optimal test 0 <= Gamma <= I of the quantum hypothesis-testing program:
// Gamma = P{rho - lambda sigma > 0} + w P{rho - lambda sigma = 0}.
struct OperatorWitness {
  HermitianOperator test;
  double lambda = 0.0;
  double boundary_weight = 0.0;
  std::size_t boundary_rank = 0;
};

// Level set of an LLR spectrum. For I0 variants atoms with llr > threshold
// are taken fully and the atom at `threshold` with `boundary_weight`; for
// I_infty the witness is the lower set {llr <= threshold}.
struct ThresholdWitness {
  double threshold = 0.0;
  double boundary_weight = 1.0;
};

using Witness = std::variant<SetWitness, OperatorWitness, ThresholdWitness>;

struct DivergenceResult {
  double value = 0.0;  // bits
  double epsilon = 0.0;
  std::string method;
  Witness witness;
  // p(A), Tr[Gamma rho], or the lower-set mass for I_infty.
  double constraint_mass = 0.0;
  // Sum over A of p_U p_V, Tr[Gamma (rho_U x rho_B)], or the max ratio.
  double objective = 0.0;
  // Greedy results carry the randomized (relaxed) value here, bounding how
  // far below the exact set optimum they can be.
  std::optional<double> upper_bound;
};

// Smooth max divergence: inf over G with p(G) >= 1 - eps of
// max_{G} log2 p(u,v) / (p(u) p(v)).
DivergenceResult classical_i_infty(const JointPmf& joint, double eps);

// Smooth min divergence: sup over A with p(A) >= 1 - eps of
// -log2 sum_A p(u) p(v).
DivergenceResult classical_i0(const JointPmf& joint, double eps,
                              I0Method method = I0Method::greedy);

// Quantum smooth min divergence of a cq state on U (x) B, where U is the
// first factor of dimension `classical_dim` and the state is block diagonal
// over it.
DivergenceResult quantum_i0(const DensityOperator& cq, std::size_t classical_dim,
                            double eps);

// Re-evaluates the objective on a result's witness (closure check).
double reevaluate(const JointPmf& joint, const DivergenceResult& result);
double reevaluate(const DensityOperator& cq, std::size_t classical_dim,
                  const DivergenceResult& result);

// Splits a block-diagonal cq operator into p(u) and the blocks rho_{uu}.
struct CqBlocks {
  std::vector<double> weights;
  std::vector<ComplexMatrix> blocks;  // p(u) rho_u
  ComplexMatrix marginal;             // rho_B = sum of blocks
};
CqBlocks split_cq(const ComplexMatrix& cq, std::size_t classical_dim,
                  double tolerance = kHermitianTolerance);

// ---------------------------------------------------------------------------
// iid evaluation through the log-likelihood-ratio spectrum.

struct LlrAtom {
  double llr = 0.0;  // bits
  double p = 0.0;    // mass under the joint measure
  double q = 0.0;    // mass under the product of marginals
};

// Sorted ascending by llr; zero-joint-mass cells are dropped (their
// product mass is `null_q`).
struct LlrSpectrum {
  std::vector<LlrAtom> atoms;
  double null_q = 0.0;
  std::size_t n = 1;
};

std::vector<LlrAtom> merge_atoms(std::vector<LlrAtom> atoms,
                                 double resolution = kLlrResolution);
std::vector<LlrAtom> convolve_atoms(std::span<const LlrAtom> a,
                                    std::span<const LlrAtom> b,
                                    double resolution = kLlrResolution,
                                    std::size_t cap = kDefaultAtomCap);

LlrSpectrum llr_spectrum(const JointPmf& base);
LlrSpectrum iid_llr_spectrum(const JointPmf& base, std::size_t n,
                             std::size_t cap = kDefaultAtomCap);

// Randomized Neyman-Pearson I0 on the n-fold product.
DivergenceResult classical_i0_iid(const LlrSpectrum& spectrum, double eps);
DivergenceResult classical_i0_iid(const JointPmf& base, std::size_t n, double eps);
// Set-based I0 restricted to upper level sets {llr >= tau}: the largest tau
// that still carries mass 1 - eps. A feasible set, so a lower bound on the
// exact set-based value; this is the decoding set used for product codes.
DivergenceResult classical_i0_iid_threshold(const LlrSpectrum& spectrum, double eps);
DivergenceResult classical_i_infty_iid(const LlrSpectrum& spectrum, double eps);
DivergenceResult classical_i_infty_iid(const JointPmf& base, std::size_t n, double eps);

double reevaluate(const LlrSpectrum& spectrum, const DivergenceResult& result);

}  // namespace marton
