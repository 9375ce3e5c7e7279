#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "marton/rng.hpp"

namespace marton {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPovmTolerance = 1e-9;
// Eigenvalues below this fraction of the largest one are treated as zero
// when inverting on the support.
inline constexpr double kSupportCutoff = 1e-10;
// Total outcome mass may deviate from 1 by at most this before measure()
// reports a logic error instead of renormalizing.
inline constexpr double kProbabilitySlack = 1e-6;

class HermitianOperator {
 public:
  // Validates max |A - A^dagger| <= tolerance, then stores (A + A^dagger)/2.
  explicit HermitianOperator(ComplexMatrix m,
                             double tolerance = kHermitianTolerance);

  static HermitianOperator identity(std::size_t dim);
  static HermitianOperator zero(std::size_t dim);
  static HermitianOperator basis_projector(std::size_t dim, std::size_t index);
  // |v><v| / <v|v>.
  static HermitianOperator projector(const ComplexVector& v);
  static HermitianOperator diagonal(std::span<const double> entries);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  bool is_psd(double tolerance = kPsdTolerance) const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator scaled(double factor) const;

 private:
  ComplexMatrix m_;
};

// Hermitian, PSD and unit trace, each within kPsdTolerance / kTraceTolerance.
class DensityOperator {
 public:
  explicit DensityOperator(ComplexMatrix m, double tolerance = kTraceTolerance);
  explicit DensityOperator(HermitianOperator h, double tolerance = kTraceTolerance);

  static DensityOperator pure(const ComplexVector& v);
  static DensityOperator basis_state(std::size_t dim, std::size_t index);
  static DensityOperator maximally_mixed(std::size_t dim);
  static DensityOperator diagonal(std::span<const double> probs);
  // Rescales a PSD operator with positive trace to unit trace.
  static DensityOperator normalized(const ComplexMatrix& m);

  std::size_t dim() const { return h_.dim(); }
  const ComplexMatrix& matrix() const { return h_.matrix(); }
  const HermitianOperator& as_hermitian() const { return h_; }

 private:
  HermitianOperator h_;
};

// Re Tr[A B].
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);
// Tr[A rho].
double expectation(const HermitianOperator& a, const DensityOperator& rho);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Traces out every subsystem not listed in `keep`. `dims` lists the factor
// dimensions in order; `keep` holds factor indices (any order, no repeats);
// the result keeps the factors in their original relative order.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);
DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::size_t> dims,
                              std::span<const std::size_t> keep);
HermitianOperator partial_trace(const HermitianOperator& a,
                                std::span<const std::size_t> dims,
                                std::span<const std::size_t> keep);

// Reorders tensor factors: output factor i is input factor perm[i].
ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 std::span<const std::size_t> dims,
                                 std::span<const std::size_t> perm);

struct EigenDecomposition {
  Eigen::VectorXd values;  // descending
  ComplexMatrix vectors;   // columns, unitary
};

EigenDecomposition eig_hermitian(const HermitianOperator& a);

// Projector onto eigenvectors with eigenvalue above cutoff * max(|lambda|).
HermitianOperator support_projector(const HermitianOperator& a,
                                    double relative_cutoff = kSupportCutoff);
// A^{-1/2} on the support of a PSD operator, zero on its kernel.
HermitianOperator inverse_sqrt_on_support(const HermitianOperator& a,
                                          double relative_cutoff = kSupportCutoff);

// Positive operator-valued measure. The last element is always the
// completion I - sum of the others (possibly zero).
class Povm {
 public:
  // Appends the completion element and validates PSD / completeness.
  static Povm with_completion(std::vector<HermitianOperator> elements,
                              double tolerance = kPovmTolerance);

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return elements_.front().dim(); }
  std::size_t completion_index() const { return elements_.size() - 1; }
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  const HermitianOperator& operator[](std::size_t i) const { return elements_[i]; }

  // Tr[T_k rho] for every k, clamped at zero and renormalized. Throws
  // InvalidArgument when any entry is below -kProbabilitySlack or the total
  // deviates from 1 by more than kProbabilitySlack.
  std::vector<double> outcome_probabilities(const DensityOperator& rho) const;

 private:
  explicit Povm(std::vector<HermitianOperator> elements)
      : elements_(std::move(elements)) {}
  std::vector<HermitianOperator> elements_;
};

// T_k = S^{-1/2} Lambda_k S^{-1/2}, S = sum Lambda_k, inverse square root on
// the support of S. Throws InvalidArgument for an empty or all-zero family.
Povm pretty_good_measurement(std::span<const HermitianOperator> ops);

// Samples an outcome index with probability Tr[T_k rho].
std::size_t measure(const DensityOperator& rho, const Povm& povm, SeededRng& rng);

// Returns lambda_min( 2(I - S) + 4T - (I - M^{-1/2} S M^{-1/2}) ), M = S + T,
// for 0 <= S <= I and T >= 0. Nonnegative (up to roundoff) by the
// Hayashi-Nagaoka operator inequality.
double hayashi_nagaoka_check(const HermitianOperator& s, const HermitianOperator& t);

// Random instances for tests and sweeps.
ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, SeededRng& rng);
ComplexMatrix random_unitary(std::size_t dim, SeededRng& rng);
DensityOperator random_density(std::size_t dim, SeededRng& rng, std::size_t rank = 0);

}  // namespace marton
