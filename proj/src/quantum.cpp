#include "marton/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "marton/error.hpp"

namespace marton {
namespace {

std::size_t product_of(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
  }
}

// Digits of `index` in the mixed radix `dims`, factor 0 most significant.
void digits_of(std::size_t index, std::span<const std::size_t> dims,
               std::vector<std::size_t>& out) {
  out.resize(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m, double tolerance) {
  require_square(m, "HermitianOperator");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= tolerance)) {
    std::ostringstream os;
    os << "HermitianOperator: max |A - A^dagger| = " << asym << " exceeds " << tolerance;
    throw InvalidArgument(os.str());
  }
  m_ = (m + m.adjoint()) * 0.5;
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::basis_projector(std::size_t dim, std::size_t index) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::projector(const ComplexVector& v) {
  const double norm2 = v.squaredNorm();
  if (norm2 <= 0.0) throw InvalidArgument("projector: zero vector");
  return HermitianOperator(v * v.adjoint() / norm2);
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> entries) {
  ComplexMatrix m = ComplexMatrix::Zero(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return HermitianOperator(std::move(m));
}

double HermitianOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double HermitianOperator::max_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool HermitianOperator::is_psd(double tolerance) const {
  return min_eigenvalue() >= -tolerance;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(m_ * factor);
}

DensityOperator::DensityOperator(ComplexMatrix m, double tolerance)
    : DensityOperator(HermitianOperator(std::move(m)), tolerance) {}

DensityOperator::DensityOperator(HermitianOperator h, double tolerance)
    : h_(std::move(h)) {
  const double tr = h_.trace();
  if (!(std::abs(tr - 1.0) <= tolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "DensityOperator: trace " << tr << " is not 1";
    throw InvalidArgument(os.str());
  }
  const double lmin = h_.min_eigenvalue();
  if (lmin < -kPsdTolerance) {
    std::ostringstream os;
    os << "DensityOperator: minimum eigenvalue " << lmin << " is negative";
    throw InvalidArgument(os.str());
  }
}

DensityOperator DensityOperator::pure(const ComplexVector& v) {
  return DensityOperator(HermitianOperator::projector(v));
}

DensityOperator DensityOperator::basis_state(std::size_t dim, std::size_t index) {
  return DensityOperator(HermitianOperator::basis_projector(dim, index));
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  return DensityOperator(ComplexMatrix(ComplexMatrix::Identity(dim, dim) /
                                       static_cast<double>(dim)));
}

DensityOperator DensityOperator::diagonal(std::span<const double> probs) {
  return DensityOperator(HermitianOperator::diagonal(probs));
}

DensityOperator DensityOperator::normalized(const ComplexMatrix& m) {
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw InvalidArgument("DensityOperator::normalized: trace not positive");
  return DensityOperator(ComplexMatrix(m / tr));
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

double expectation(const HermitianOperator& a, const DensityOperator& rho) {
  return trace_product(a.matrix(), rho.matrix());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(kron(a.matrix(), b.matrix()));
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  require_square(m, "partial_trace");
  const std::size_t total = product_of(dims);
  if (total != static_cast<std::size_t>(m.rows())) {
    std::ostringstream os;
    os << "partial_trace: factor dimensions multiply to " << total
       << " but the operator has dimension " << m.rows();
    throw InvalidArgument(os.str());
  }
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) {
    if (k >= dims.size() || kept[k]) throw InvalidArgument("partial_trace: bad keep list");
    kept[k] = true;
  }
  std::size_t kept_dim = 1, traced_dim = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) (kept[k] ? kept_dim : traced_dim) *= dims[k];

  // groups[t] lists full indices whose traced digits equal t, ordered by
  // their kept index.
  std::vector<std::vector<Eigen::Index>> groups(traced_dim,
                                                std::vector<Eigen::Index>(kept_dim));
  std::vector<std::size_t> digits;
  for (std::size_t i = 0; i < total; ++i) {
    digits_of(i, dims, digits);
    std::size_t ki = 0, ti = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (kept[k]) ki = ki * dims[k] + digits[k];
      else ti = ti * dims[k] + digits[k];
    }
    groups[ti][ki] = static_cast<Eigen::Index>(i);
  }
  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (const auto& g : groups) out += m(g, g);
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho,
                              std::span<const std::size_t> dims,
                              std::span<const std::size_t> keep) {
  return DensityOperator(partial_trace(rho.matrix(), dims, keep));
}

HermitianOperator partial_trace(const HermitianOperator& a,
                                std::span<const std::size_t> dims,
                                std::span<const std::size_t> keep) {
  return HermitianOperator(partial_trace(a.matrix(), dims, keep));
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m,
                                 std::span<const std::size_t> dims,
                                 std::span<const std::size_t> perm) {
  require_square(m, "permute_subsystems");
  if (perm.size() != dims.size()) throw InvalidArgument("permute_subsystems: bad permutation");
  const std::size_t total = product_of(dims);
  if (total != static_cast<std::size_t>(m.rows())) {
    throw InvalidArgument("permute_subsystems: dimension mismatch");
  }
  std::vector<Eigen::Index> target(total);
  std::vector<std::size_t> digits;
  for (std::size_t i = 0; i < total; ++i) {
    digits_of(i, dims, digits);
    std::size_t out = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) out = out * dims[perm[k]] + digits[perm[k]];
    target[i] = static_cast<Eigen::Index>(out);
  }
  ComplexMatrix result(m.rows(), m.cols());
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j)
      result(target[i], target[j]) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return result;
}

EigenDecomposition eig_hermitian(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) throw ConvergenceError("eig_hermitian: solver failed");
  const Eigen::Index n = es.eigenvalues().size();
  EigenDecomposition out{Eigen::VectorXd(n), ComplexMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

namespace {

template <typename F>
HermitianOperator spectral_map(const HermitianOperator& a, double relative_cutoff, F f) {
  const EigenDecomposition ed = eig_hermitian(a);
  const double scale = ed.values.cwiseAbs().maxCoeff();
  Eigen::VectorXd mapped(ed.values.size());
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    const double v = ed.values(i);
    mapped(i) = (scale > 0.0 && v > relative_cutoff * scale) ? f(v) : 0.0;
  }
  return HermitianOperator(ed.vectors * mapped.asDiagonal() * ed.vectors.adjoint());
}

}  // namespace

HermitianOperator support_projector(const HermitianOperator& a, double relative_cutoff) {
  return spectral_map(a, relative_cutoff, [](double) { return 1.0; });
}

HermitianOperator inverse_sqrt_on_support(const HermitianOperator& a,
                                          double relative_cutoff) {
  return spectral_map(a, relative_cutoff, [](double v) { return 1.0 / std::sqrt(v); });
}

Povm Povm::with_completion(std::vector<HermitianOperator> elements, double tolerance) {
  if (elements.empty()) throw InvalidArgument("Povm: no elements");
  const std::size_t dim = elements.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < elements.size(); ++k) {
    if (elements[k].dim() != dim) throw InvalidArgument("Povm: dimension mismatch");
    const double lmin = elements[k].min_eigenvalue();
    if (lmin < -tolerance) {
      std::ostringstream os;
      os << "Povm: element " << k << " has eigenvalue " << lmin;
      throw InvalidArgument(os.str());
    }
    sum += elements[k].matrix();
  }
  HermitianOperator completion(ComplexMatrix(ComplexMatrix::Identity(dim, dim) - sum));
  const double cmin = completion.min_eigenvalue();
  if (cmin < -tolerance) {
    std::ostringstream os;
    os << "Povm: elements sum above identity (completion eigenvalue " << cmin << ")";
    throw InvalidArgument(os.str());
  }
  elements.push_back(std::move(completion));
  return Povm(std::move(elements));
}

std::vector<double> Povm::outcome_probabilities(const DensityOperator& rho) const {
  if (rho.dim() != dim()) throw InvalidArgument("measure: state/POVM dimension mismatch");
  std::vector<double> p(elements_.size());
  double total = 0.0;
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const double v = trace_product(elements_[k].matrix(), rho.matrix());
    if (v < -kProbabilitySlack) {
      std::ostringstream os;
      os << "measure: outcome " << k << " has probability " << v;
      throw InvalidArgument(os.str());
    }
    p[k] = std::max(v, 0.0);
    total += p[k];
  }
  if (std::abs(total - 1.0) > kProbabilitySlack) {
    std::ostringstream os;
    os.precision(17);
    os << "measure: outcome probabilities sum to " << total;
    throw InvalidArgument(os.str());
  }
  for (double& v : p) v /= total;
  return p;
}

Povm pretty_good_measurement(std::span<const HermitianOperator> ops) {
  if (ops.empty()) throw InvalidArgument("pretty_good_measurement: empty family");
  const std::size_t dim = ops.front().dim();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& op : ops) {
    if (op.dim() != dim) throw InvalidArgument("pretty_good_measurement: dimension mismatch");
    if (op.min_eigenvalue() < -kPovmTolerance) {
      throw InvalidArgument("pretty_good_measurement: operator is not PSD");
    }
    sum += op.matrix();
  }
  const HermitianOperator s(sum);
  if (!(s.max_eigenvalue() > 0.0)) {
    throw InvalidArgument("pretty_good_measurement: all operators are zero");
  }
  const ComplexMatrix root = inverse_sqrt_on_support(s).matrix();
  std::vector<HermitianOperator> elements;
  elements.reserve(ops.size() + 1);
  for (const auto& op : ops) elements.emplace_back(root * op.matrix() * root, 1e-9);
  return Povm::with_completion(std::move(elements));
}

std::size_t measure(const DensityOperator& rho, const Povm& povm, SeededRng& rng) {
  const std::vector<double> p = povm.outcome_probabilities(rho);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    last_positive = k;
    acc += p[k];
    if (u < acc) return k;
  }
  return last_positive;
}

double hayashi_nagaoka_check(const HermitianOperator& s, const HermitianOperator& t) {
  if (s.dim() != t.dim()) throw InvalidArgument("hayashi_nagaoka_check: dimension mismatch");
  const EigenDecomposition es = eig_hermitian(s);
  if (es.values.minCoeff() < -kPovmTolerance || es.values.maxCoeff() > 1.0 + kPovmTolerance) {
    throw InvalidArgument("hayashi_nagaoka_check: S must satisfy 0 <= S <= I");
  }
  if (t.min_eigenvalue() < -kPovmTolerance) {
    throw InvalidArgument("hayashi_nagaoka_check: T must be PSD");
  }
  const std::size_t n = s.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix root = inverse_sqrt_on_support(s + t).matrix();
  const ComplexMatrix lhs = id - root * s.matrix() * root;
  const ComplexMatrix rhs = 2.0 * (id - s.matrix()) + 4.0 * t.matrix();
  return HermitianOperator(ComplexMatrix(rhs - lhs), 1e-8).min_eigenvalue();
}

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, SeededRng& rng) {
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      g(i, j) = std::complex<double>(re, im);
    }
  return g;
}

ComplexMatrix random_unitary(std::size_t dim, SeededRng& rng) {
  const ComplexMatrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t i = 0; i < dim; ++i) {
    const auto d = r(i, i);
    if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

DensityOperator random_density(std::size_t dim, SeededRng& rng, std::size_t rank) {
  if (rank == 0 || rank > dim) rank = dim;
  const ComplexMatrix g = random_ginibre(dim, rank, rng);
  return DensityOperator::normalized(g * g.adjoint());
}

}  // namespace marton
