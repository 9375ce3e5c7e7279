#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "marton/channel.hpp"
#include "marton/divergence.hpp"
#include "marton/quantum.hpp"

namespace marton {

using Symbol = std::uint16_t;

struct RateParams {
  int R1 = 0;
  int R2 = 0;
  int r1 = 0;
  int r2 = 0;
  double eps_tilde = 0.0;
  double eps0 = 0.0;
  double eps_infty = 0.0;
  double I_inf = 0.0;
  double I0B = 0.0;
  double I0C = 0.0;
};

// log2(1 / eps_tilde).
double log_inv(double eps_tilde);

struct ConstraintCheck {
  std::string name;
  std::string expression;
  double lhs = 0.0;
  double rhs = 0.0;
  bool equality = false;
  bool ok = false;
  double slack() const { return rhs - lhs; }
};

// The four conditions a band pair must meet: row-band cap, column-band cap,
// band floor and band sum.
std::vector<ConstraintCheck> band_constraints(const RateParams& p);
// The three rate conditions on (R1, R2).
std::vector<ConstraintCheck> rate_constraints(const RateParams& p);
bool all_hold(const std::vector<ConstraintCheck>& checks);

struct BandSelection {
  int r1 = 0;
  int r2 = 0;
  int floor = 0;   // ceil(log2(1/eps_tilde))
  int target = 0;  // required r1 + r2
  int cap1 = 0;    // largest r1 the row-band cap allows
  int cap2 = 0;
};

// Starts from r1 = r2 = floor, raises r1 to its cap, then r2, until the sum
// reaches the target. Throws InfeasibleError naming the failing condition.
BandSelection select_band_exponents(int R1, int R2, double I0B, double I0C, double I_inf,
                                    double eps_tilde);

// ---------------------------------------------------------------------------

struct CodebookSpec {
  int R1 = 0;
  int R2 = 0;
  int r1 = 0;
  int r2 = 0;
  std::size_t n = 1;  // symbols per row/column entry
  double I_inf = 0.0;
};

inline constexpr std::size_t kCodebookSymbolCap = std::size_t{1} << 28;

// Rows U[k] and columns V[l] are iid draws (n symbols each, memoryless) from
// the design marginals; eta(k, l) is derived on demand from the seed.
// Indices are 0-based; message m (1-based) owns rows [(m-1) 2^r1, m 2^r1).
class Codebook {
 public:
  Codebook(const InputDesign& design, CodebookSpec spec, std::uint64_t seed);

  std::size_t rows() const { return rows_count_; }
  std::size_t cols() const { return cols_count_; }
  std::size_t n() const { return spec_.n; }
  const CodebookSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const Symbol> row(std::size_t k) const {
    return {rows_.data() + k * spec_.n, spec_.n};
  }
  std::span<const Symbol> col(std::size_t l) const {
    return {cols_.data() + l * spec_.n, spec_.n};
  }

  double eta(std::size_t k, std::size_t l) const;
  double llr(std::size_t k, std::size_t l) const;
  // min(1, p(u,v) / (2^I_inf p(u) p(v))).
  double acceptance(std::size_t k, std::size_t l) const;
  bool indicator(std::size_t k, std::size_t l) const;

  // f applied symbol-wise; empty when some symbol pair is unmapped.
  void codeword(std::size_t k, std::size_t l, std::vector<Symbol>& x) const;

  std::size_t row_message(std::size_t k) const { return (k >> spec_.r1) + 1; }
  std::size_t col_message(std::size_t l) const { return (l >> spec_.r2) + 1; }
  std::size_t row_band_begin(std::size_t m1) const { return (m1 - 1) << spec_.r1; }
  std::size_t col_band_begin(std::size_t m2) const { return (m2 - 1) << spec_.r2; }
  std::size_t row_band_size() const { return std::size_t{1} << spec_.r1; }
  std::size_t col_band_size() const { return std::size_t{1} << spec_.r2; }
  std::size_t messages1() const { return std::size_t{1} << spec_.R1; }
  std::size_t messages2() const { return std::size_t{1} << spec_.R2; }

  // FNV-1a over seed, shape and sampled rows/columns.
  std::uint64_t digest() const;

 private:
  CodebookSpec spec_;
  std::uint64_t seed_;
  std::size_t rows_count_, cols_count_, v_size_;
  std::vector<double> llr_table_;
  std::vector<std::uint32_t> f_;
  std::vector<Symbol> rows_, cols_;
};

// alpha/beta of a candidate cell, from the auxiliary sequence and the input
// sequence it maps to.
class CellEvaluator {
 public:
  virtual ~CellEvaluator() = default;
  virtual double alpha(std::span<const Symbol> u, std::span<const Symbol> x) const = 0;
  virtual double beta(std::span<const Symbol> v, std::span<const Symbol> x) const = 0;
};

// Single-symbol evaluator from alpha[u * |X| + x], beta[v * |X| + x].
class TableEvaluator : public CellEvaluator {
 public:
  TableEvaluator(std::vector<double> alpha, std::vector<double> beta, std::size_t x_size)
      : alpha_(std::move(alpha)), beta_(std::move(beta)), x_size_(x_size) {}
  double alpha(std::span<const Symbol> u, std::span<const Symbol> x) const override;
  double beta(std::span<const Symbol> v, std::span<const Symbol> x) const override;

 private:
  std::vector<double> alpha_, beta_;
  std::size_t x_size_;
};

// Decoding set {(a^n, y^n): sum_t score(a_t, y_t) >= threshold}. A single
// symbol set A is the case n = 1 with 0/1 scores and threshold 1; an llr
// level set uses llr scores.
struct ScoreSet {
  std::size_t a_size = 0;
  std::size_t out_size = 0;
  std::vector<double> score;  // a * out_size + y
  double threshold = 0.0;
  double tolerance = 0.0;

  double sum(std::span<const Symbol> a, std::span<const Symbol> y) const;
  bool contains(std::span<const Symbol> a, std::span<const Symbol> y) const {
    return sum(a, y) >= threshold - tolerance;
  }
};

ScoreSet score_set_from_witness(const JointPmf& joint, const SetWitness& witness);
ScoreSet score_set_from_threshold(const JointPmf& base, double threshold, std::size_t n);

// alpha = P(sum_t score1(u_t, Y_t) >= tau1 | x), Y_t ~ p(y | x_t); the score
// distribution is built by convolution and cached per (u, x) type.
class ScoreSetEvaluator : public CellEvaluator {
 public:
  ScoreSetEvaluator(const ClassicalBroadcastChannel& channel, ScoreSet a1, ScoreSet a2);
  double alpha(std::span<const Symbol> u, std::span<const Symbol> x) const override;
  double beta(std::span<const Symbol> v, std::span<const Symbol> x) const override;
  std::size_t cache_size() const;

 private:
  double evaluate(const ScoreSet& set, bool bob, std::span<const Symbol> a,
                  std::span<const Symbol> x) const;
  std::size_t x_size_;
  std::vector<double> py_, pz_;  // x * |Y| + y
  std::size_t y_size_, z_size_;
  ScoreSet a1_, a2_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, double> cache_;
};

struct EncodeOutcome {
  bool fallback = true;
  std::size_t k = 0;
  std::size_t l = 0;
  std::vector<Symbol> x;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t scanned = 0;
};

// Lexicographic scan of band (m1, m2) for the first cell with I = 1 and
// alpha, beta > 1 - 4 eps0; otherwise x is `fallback_symbol` repeated.
EncodeOutcome encode(const Codebook& codebook, std::size_t m1, std::size_t m2,
                     const CellEvaluator& evaluator, double eps0, Symbol fallback_symbol = 0);

struct ClassicalDecodeOutcome {
  std::size_t message = 1;
  std::optional<std::size_t> index;
  std::vector<std::size_t> matches;  // ascending
};

ClassicalDecodeOutcome decode_bob_classical(const Codebook& codebook, std::span<const Symbol> y,
                                            const ScoreSet& a1);
ClassicalDecodeOutcome decode_charlie_classical(const Codebook& codebook,
                                                std::span<const Symbol> z, const ScoreSet& a2);

// Pretty good measurement over codebook entries. Entries with the same
// auxiliary symbol share one operator, so the POVM is stored per symbol with
// multiplicities; outcome k in [0, entries) or `entries` for the completion.
class QuantumDecoder {
 public:
  QuantumDecoder(std::vector<HermitianOperator> lambdas, std::vector<Symbol> entries);

  std::size_t entries() const { return entries_.size(); }
  std::size_t completion_outcome() const { return entries_.size(); }
  std::size_t dim() const { return completion_.dim(); }
  const HermitianOperator& element_for_symbol(Symbol a) const { return elements_.at(a); }
  const HermitianOperator& element(std::size_t outcome) const;
  const HermitianOperator& completion() const { return completion_; }
  Symbol symbol(std::size_t k) const { return entries_[k]; }
  std::size_t multiplicity(Symbol a) const { return counts_.at(a); }

  // Tr[T_a rho] per symbol a, and the completion probability last.
  std::vector<double> symbol_probabilities(const ComplexMatrix& rho) const;
  // Tr[T_k rho] for every entry k, completion last.
  std::vector<double> outcome_probabilities(const DensityOperator& rho) const;
  std::size_t sample(const ComplexMatrix& rho, SeededRng& rng) const;

  // Sum over entries of Tr[Lambda_{a_k} rho].
  double lambda_mass(const ComplexMatrix& rho) const;
  const HermitianOperator& lambda(Symbol a) const { return lambdas_.at(a); }

 private:
  std::vector<HermitianOperator> lambdas_;
  std::vector<Symbol> entries_;
  std::vector<std::size_t> counts_;
  std::vector<HermitianOperator> elements_;
  HermitianOperator completion_;
};

enum class Receiver { bob, charlie };

struct QuantumDecodeOutcome {
  std::size_t outcome = 0;
  bool failed = false;  // completion element
  std::size_t message = 1;
  std::optional<std::size_t> index;
};

// Measures the received state (already reduced to the receiver's system).
QuantumDecodeOutcome decode_quantum(const Codebook& codebook, const QuantumDecoder& decoder,
                                    const DensityOperator& state, Receiver side, SeededRng& rng);

struct JointQuantumOutcome {
  QuantumDecodeOutcome bob;
  QuantumDecodeOutcome charlie;
};

// Bob measures rho^{BC} first; Charlie measures the post-measurement
// conditional state Tr_B[(T_k (x) I) rho] / p_k.
JointQuantumOutcome decode_quantum_joint(const Codebook& codebook, const QuantumDecoder& bob,
                                         const QuantumDecoder& charlie,
                                         const DensityOperator& rho_bc, std::size_t dim_b,
                                         std::size_t dim_c, SeededRng& rng);

// Lambda_u: the diagonal blocks of a block-diagonal test on U (x) B.
std::vector<HermitianOperator> lambda_blocks(const HermitianOperator& gamma,
                                             std::size_t classical_dim);

}  // namespace marton
