#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "marton/rng.hpp"

namespace marton {

inline constexpr double kMassTolerance = 1e-12;

// Probability mass function over a finite labeled alphabet.
class Pmf {
 public:
  Pmf(std::vector<std::string> labels, std::vector<double> probs,
      double tolerance = kMassTolerance);

  static Pmf uniform(std::vector<std::string> labels);
  static Pmf point_mass(std::vector<std::string> labels, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  // Throws InvalidArgument for unknown labels.
  std::size_t index_of(const std::string& label) const;

  // Inverse-CDF draw. Zero-probability labels are never returned.
  std::size_t sample_index(SeededRng& rng) const;
  const std::string& sample(SeededRng& rng) const {
    return labels_[sample_index(rng)];
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

// Joint pmf over rows x cols, stored row-major.
class JointPmf {
 public:
  JointPmf(std::vector<std::string> row_labels,
           std::vector<std::string> col_labels, std::vector<double> probs,
           double tolerance = kMassTolerance);
  JointPmf(std::vector<std::string> row_labels,
           std::vector<std::string> col_labels,
           const std::vector<std::vector<double>>& probs,
           double tolerance = kMassTolerance);

  // Labels default to "0", "1", ...
  static JointPmf from_matrix(const std::vector<std::vector<double>>& probs);
  static JointPmf product(const Pmf& rows, const Pmf& cols);

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  std::size_t cells() const { return probs_.size(); }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }
  const std::vector<double>& probs() const { return probs_; }
  double operator()(std::size_t r, std::size_t c) const {
    return probs_[r * cols() + c];
  }

  const Pmf& row_marginal() const { return row_marginal_; }
  const Pmf& col_marginal() const { return col_marginal_; }

  // p(r,c) / (p(r) p(c)); zero when p(r,c) = 0.
  double ratio(std::size_t r, std::size_t c) const;
  // log2 of ratio; -inf when p(r,c) = 0.
  double llr(std::size_t r, std::size_t c) const;

  // Draws a cell index r * cols + c.
  std::size_t sample_cell(SeededRng& rng) const;

 private:
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  Pmf row_marginal_;
  Pmf col_marginal_;
};

std::pair<Pmf, Pmf> marginals(const JointPmf& joint);

// I(row; col) in bits, with 0 log 0 = 0.
double mutual_information(const JointPmf& joint);

// Binary entropy in bits.
double binary_entropy(double p);

}  // namespace marton
