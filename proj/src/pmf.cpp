#include "marton/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "marton/error.hpp"

namespace marton {
namespace {

void validate_labels(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) {
    throw InvalidArgument(std::string(what) + ": alphabet must be non-empty");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw InvalidArgument(std::string(what) + ": duplicate label '" + l + "'");
    }
  }
}

void validate_probs(const std::vector<double>& probs, double tolerance,
                    const char* what) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0) {
      std::ostringstream os;
      os << what << ": probs[" << i << "] = " << p << " is not a probability";
      throw InvalidArgument(os.str());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": probabilities sum to " << total << ", not 1";
    throw InvalidArgument(os.str());
  }
}

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, const std::vector<double>& probs,
                 double u) {
  // Scale by the realized total so roundoff in the sum cannot leave a gap.
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  if (i >= cdf.size()) i = cdf.size() - 1;
  while (probs[i] == 0.0 && i > 0) --i;
  return i;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& m,
                            std::size_t rows, std::size_t cols) {
  if (m.size() != rows) throw InvalidArgument("JointPmf: row count mismatch");
  std::vector<double> flat;
  flat.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (m[r].size() != cols) {
      throw InvalidArgument("JointPmf: row " + std::to_string(r) +
                            " has wrong length");
    }
    flat.insert(flat.end(), m[r].begin(), m[r].end());
  }
  return flat;
}

Pmf row_sums(const std::vector<std::string>& rl, std::size_t cols,
             const std::vector<double>& probs) {
  std::vector<double> out(rl.size(), 0.0);
  for (std::size_t r = 0; r < rl.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r] += probs[r * cols + c];
  return Pmf(rl, std::move(out), 1e-9);
}

Pmf col_sums(const std::vector<std::string>& cl, std::size_t rows,
             const std::vector<double>& probs) {
  std::vector<double> out(cl.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cl.size(); ++c) out[c] += probs[r * cl.size() + c];
  return Pmf(cl, std::move(out), 1e-9);
}

std::vector<double> checked_joint(const std::vector<std::string>& rl,
                                  const std::vector<std::string>& cl,
                                  std::vector<double> probs, double tolerance) {
  validate_labels(rl, "JointPmf rows");
  validate_labels(cl, "JointPmf cols");
  if (probs.size() != rl.size() * cl.size()) {
    throw InvalidArgument("JointPmf: probs has wrong size");
  }
  validate_probs(probs, tolerance, "JointPmf");
  return probs;
}

}  // namespace

Pmf::Pmf(std::vector<std::string> labels, std::vector<double> probs,
         double tolerance)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  validate_labels(labels_, "Pmf");
  if (labels_.size() != probs_.size()) {
    throw InvalidArgument("Pmf: labels and probs differ in length");
  }
  validate_probs(probs_, tolerance, "Pmf");
  cdf_ = cumulative(probs_);
}

Pmf Pmf::uniform(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  return Pmf(std::move(labels), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::point_mass(std::vector<std::string> labels, std::size_t index) {
  std::vector<double> p(labels.size(), 0.0);
  p.at(index) = 1.0;
  return Pmf(std::move(labels), std::move(p));
}

std::size_t Pmf::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidArgument("unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Pmf::sample_index(SeededRng& rng) const {
  return draw(cdf_, probs_, rng.uniform());
}

JointPmf::JointPmf(std::vector<std::string> row_labels,
                   std::vector<std::string> col_labels, std::vector<double> probs,
                   double tolerance)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      probs_(checked_joint(row_labels_, col_labels_, std::move(probs), tolerance)),
      cdf_(cumulative(probs_)),
      row_marginal_(row_sums(row_labels_, col_labels_.size(), probs_)),
      col_marginal_(col_sums(col_labels_, row_labels_.size(), probs_)) {}

JointPmf::JointPmf(std::vector<std::string> row_labels,
                   std::vector<std::string> col_labels,
                   const std::vector<std::vector<double>>& probs, double tolerance)
    : JointPmf(row_labels, col_labels,
               flatten(probs, row_labels.size(), col_labels.size()), tolerance) {}

JointPmf JointPmf::from_matrix(const std::vector<std::vector<double>>& probs) {
  if (probs.empty()) throw InvalidArgument("JointPmf: empty matrix");
  return JointPmf(default_labels(probs.size()), default_labels(probs[0].size()),
                  probs);
}

JointPmf JointPmf::product(const Pmf& rows, const Pmf& cols) {
  std::vector<double> p;
  p.reserve(rows.size() * cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) p.push_back(rows[r] * cols[c]);
  return JointPmf(rows.labels(), cols.labels(), std::move(p), 1e-9);
}

double JointPmf::ratio(std::size_t r, std::size_t c) const {
  const double p = (*this)(r, c);
  if (p == 0.0) return 0.0;
  return p / (row_marginal_[r] * col_marginal_[c]);
}

double JointPmf::llr(std::size_t r, std::size_t c) const {
  const double p = (*this)(r, c);
  if (p == 0.0) return -INFINITY;
  return std::log2(p) - std::log2(row_marginal_[r]) - std::log2(col_marginal_[c]);
}

std::size_t JointPmf::sample_cell(SeededRng& rng) const {
  return draw(cdf_, probs_, rng.uniform());
}

std::pair<Pmf, Pmf> marginals(const JointPmf& joint) {
  return {joint.row_marginal(), joint.col_marginal()};
}

double mutual_information(const JointPmf& joint) {
  double mi = 0.0;
  for (std::size_t r = 0; r < joint.rows(); ++r) {
    for (std::size_t c = 0; c < joint.cols(); ++c) {
      const double p = joint(r, c);
      if (p > 0.0) mi += p * joint.llr(r, c);
    }
  }
  return std::max(mi, 0.0);
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace marton
