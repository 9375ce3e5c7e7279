#include "marton/coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "marton/error.hpp"
#include "marton/rng.hpp"

namespace marton {

namespace {

int ceil_bits(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }
int floor_bits(double x) { return static_cast<int>(std::floor(x + 1e-9)); }

ConstraintCheck le(std::string name, std::string expr, double lhs, double rhs) {
  return {std::move(name), std::move(expr), lhs, rhs, false, lhs <= rhs + 1e-9, };
}

}  // namespace

double log_inv(double eps_tilde) {
  if (!(eps_tilde > 0.0 && eps_tilde < 1.0)) {
    throw InvalidArgument("eps_tilde must lie in (0, 1), got " + std::to_string(eps_tilde));
  }
  return -std::log2(eps_tilde);
}

std::vector<ConstraintCheck> band_constraints(const RateParams& p) {
  const double L = log_inv(p.eps_tilde);
  std::vector<ConstraintCheck> out;
  out.push_back(le("row-band cap", "R1 + r1 <= I0B - 4 log(1/eps~) - 1", p.R1 + p.r1,
                   p.I0B - 4 * L - 1));
  out.push_back(le("column-band cap", "R2 + r2 <= I0C - 4 log(1/eps~) - 1", p.R2 + p.r2,
                   p.I0C - 4 * L - 1));
  out.push_back(le("row-band floor", "log(1/eps~) <= r1", L, p.r1));
  out.push_back(le("column-band floor", "log(1/eps~) <= r2", L, p.r2));
  ConstraintCheck sum{"band sum", "r1 + r2 = ceil(I_inf + 3 log(1/eps~))",
                      static_cast<double>(p.r1 + p.r2),
                      static_cast<double>(ceil_bits(p.I_inf + 3 * L)), true, false};
  sum.ok = sum.lhs == sum.rhs;
  out.push_back(sum);
  return out;
}

std::vector<ConstraintCheck> rate_constraints(const RateParams& p) {
  const double L = log_inv(p.eps_tilde);
  return {
      le("rate R1", "R1 <= I0B - 5 log(1/eps~) - 2", p.R1, p.I0B - 5 * L - 2),
      le("rate R2", "R2 <= I0C - 5 log(1/eps~) - 2", p.R2, p.I0C - 5 * L - 2),
      le("sum rate", "R1 + R2 <= I0B + I0C - I_inf - 11 log(1/eps~) - 5", p.R1 + p.R2,
         p.I0B + p.I0C - p.I_inf - 11 * L - 5),
  };
}

bool all_hold(const std::vector<ConstraintCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.ok; });
}

BandSelection select_band_exponents(int R1, int R2, double I0B, double I0C, double I_inf,
                                    double eps_tilde) {
  if (R1 < 0 || R2 < 0) throw InvalidArgument("message exponents must be nonnegative");
  const double L = log_inv(eps_tilde);
  BandSelection s;
  s.floor = std::max(1, ceil_bits(L));
  s.target = ceil_bits(I_inf + 3 * L);
  s.cap1 = floor_bits(I0B - 4 * L - 1) - R1;
  s.cap2 = floor_bits(I0C - 4 * L - 1) - R2;
  if (s.cap1 < s.floor) {
    throw InfeasibleError("row-band cap",
                          "row-band cap: R1 + r1 <= I0B - 4 log(1/eps~) - 1 leaves r1 <= " +
                              std::to_string(s.cap1) + " below the floor " +
                              std::to_string(s.floor));
  }
  if (s.cap2 < s.floor) {
    throw InfeasibleError("column-band cap",
                          "column-band cap: R2 + r2 <= I0C - 4 log(1/eps~) - 1 leaves r2 <= " +
                              std::to_string(s.cap2) + " below the floor " +
                              std::to_string(s.floor));
  }
  s.r1 = s.floor;
  s.r2 = s.floor;
  if (s.r1 + s.r2 > s.target) {
    throw InfeasibleError("band sum", "band sum: the floors already give r1 + r2 = " +
                                          std::to_string(s.r1 + s.r2) + " > target " +
                                          std::to_string(s.target));
  }
  s.r1 = std::min(s.cap1, s.target - s.r2);
  s.r2 = std::min(s.cap2, s.target - s.r1);
  if (s.r1 + s.r2 < s.target) {
    throw InfeasibleError("band sum", "band sum: caps allow r1 + r2 <= " +
                                          std::to_string(s.cap1 + s.cap2) + " < target " +
                                          std::to_string(s.target) +
                                          " (sum-rate condition violated)");
  }
  return s;
}

// ---------------------------------------------------------------------------

Codebook::Codebook(const InputDesign& design, CodebookSpec spec, std::uint64_t seed)
    : spec_(spec), seed_(seed), v_size_(design.v_size()), f_(design.f_table()) {
  if (spec_.n == 0) throw InvalidArgument("codebook symbol length must be positive");
  if (spec_.R1 < 0 || spec_.R2 < 0 || spec_.r1 < 0 || spec_.r2 < 0) {
    throw InvalidArgument("codebook exponents must be nonnegative");
  }
  if (spec_.R1 + spec_.r1 > 30 || spec_.R2 + spec_.r2 > 30) {
    throw CapExceeded("codebook side exceeds 2^30 entries");
  }
  if (design.u_size() > 65536 || design.v_size() > 65536 || design.x_size() > 65536) {
    throw CapExceeded("codebook alphabets are limited to 65536 symbols");
  }
  rows_count_ = std::size_t{1} << (spec_.R1 + spec_.r1);
  cols_count_ = std::size_t{1} << (spec_.R2 + spec_.r2);
  if ((rows_count_ + cols_count_) > kCodebookSymbolCap / spec_.n) {
    throw CapExceeded("codebook would hold more than 2^28 symbols");
  }
  const JointPmf& uv = design.uv();
  llr_table_.resize(uv.cells());
  for (std::size_t u = 0; u < uv.rows(); ++u)
    for (std::size_t v = 0; v < uv.cols(); ++v) llr_table_[u * uv.cols() + v] = uv.llr(u, v);

  rows_.resize(rows_count_ * spec_.n);
  cols_.resize(cols_count_ * spec_.n);
  SeededRng row_rng(seed_, streams::kRows);
  for (auto& s : rows_) s = static_cast<Symbol>(uv.row_marginal().sample_index(row_rng));
  SeededRng col_rng(seed_, streams::kCols);
  for (auto& s : cols_) s = static_cast<Symbol>(uv.col_marginal().sample_index(col_rng));
}

double Codebook::eta(std::size_t k, std::size_t l) const {
  return SeededRng::uniform_pos_at(seed_, streams::kEta,
                                   (static_cast<std::uint64_t>(k) << 32) | l);
}

double Codebook::llr(std::size_t k, std::size_t l) const {
  const Symbol* u = rows_.data() + k * spec_.n;
  const Symbol* v = cols_.data() + l * spec_.n;
  double s = 0.0;
  for (std::size_t t = 0; t < spec_.n; ++t) s += llr_table_[u[t] * v_size_ + v[t]];
  return s;
}

double Codebook::acceptance(std::size_t k, std::size_t l) const {
  double x = llr(k, l) - spec_.I_inf;
  if (x >= 0.0) return 1.0;
  return std::exp2(x);
}

bool Codebook::indicator(std::size_t k, std::size_t l) const {
  double a = acceptance(k, l);
  if (a >= 1.0) return true;
  if (a <= 0.0) return false;
  return eta(k, l) <= a;
}

void Codebook::codeword(std::size_t k, std::size_t l, std::vector<Symbol>& x) const {
  const Symbol* u = rows_.data() + k * spec_.n;
  const Symbol* v = cols_.data() + l * spec_.n;
  x.resize(spec_.n);
  for (std::size_t t = 0; t < spec_.n; ++t) {
    std::uint32_t xt = f_[u[t] * v_size_ + v[t]];
    if (xt == InputDesign::kUnmapped) {
      x.clear();
      return;
    }
    x[t] = static_cast<Symbol>(xt);
  }
}

std::uint64_t Codebook::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ull;
    }
  };
  const std::int64_t shape[5] = {spec_.R1, spec_.R2, spec_.r1, spec_.r2,
                                 static_cast<std::int64_t>(spec_.n)};
  mix(&seed_, sizeof seed_);
  mix(shape, sizeof shape);
  mix(&spec_.I_inf, sizeof spec_.I_inf);
  mix(rows_.data(), rows_.size() * sizeof(Symbol));
  mix(cols_.data(), cols_.size() * sizeof(Symbol));
  return h;
}

// ---------------------------------------------------------------------------

double TableEvaluator::alpha(std::span<const Symbol> u, std::span<const Symbol> x) const {
  if (u.size() != 1 || x.size() != 1) throw InvalidArgument("table evaluator is single-symbol");
  return alpha_.at(u[0] * x_size_ + x[0]);
}

double TableEvaluator::beta(std::span<const Symbol> v, std::span<const Symbol> x) const {
  if (v.size() != 1 || x.size() != 1) throw InvalidArgument("table evaluator is single-symbol");
  return beta_.at(v[0] * x_size_ + x[0]);
}

double ScoreSet::sum(std::span<const Symbol> a, std::span<const Symbol> y) const {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += score[a[t] * out_size + y[t]];
  return s;
}

ScoreSet score_set_from_witness(const JointPmf& joint, const SetWitness& witness) {
  if (witness.boundary_cell && witness.boundary_weight > 0.0) {
    throw InvalidArgument("a decoding set needs a deterministic (non-fractional) witness");
  }
  ScoreSet s;
  s.a_size = joint.rows();
  s.out_size = joint.cols();
  s.score.assign(joint.cells(), 0.0);
  for (auto cell : witness.cells) s.score.at(cell) = 1.0;
  s.threshold = 1.0;
  s.tolerance = 1e-9;
  return s;
}

ScoreSet score_set_from_threshold(const JointPmf& base, double threshold, std::size_t n) {
  ScoreSet s;
  s.a_size = base.rows();
  s.out_size = base.cols();
  s.score.resize(base.cells());
  for (std::size_t a = 0; a < base.rows(); ++a)
    for (std::size_t y = 0; y < base.cols(); ++y) s.score[a * base.cols() + y] = base.llr(a, y);
  s.threshold = threshold;
  s.tolerance = 2.0 * static_cast<double>(n) * kLlrResolution;
  return s;
}

ScoreSetEvaluator::ScoreSetEvaluator(const ClassicalBroadcastChannel& channel, ScoreSet a1,
                                     ScoreSet a2)
    : x_size_(channel.x_size()),
      y_size_(channel.y_size()),
      z_size_(channel.z_size()),
      a1_(std::move(a1)),
      a2_(std::move(a2)) {
  if (a1_.out_size != y_size_ || a2_.out_size != z_size_) {
    throw InvalidArgument("decoding sets do not match the channel output alphabets");
  }
  for (std::size_t x = 0; x < x_size_; ++x) {
    for (std::size_t y = 0; y < y_size_; ++y) py_.push_back(channel.p_y(x, y));
    for (std::size_t z = 0; z < z_size_; ++z) pz_.push_back(channel.p_z(x, z));
  }
}

double ScoreSetEvaluator::alpha(std::span<const Symbol> u, std::span<const Symbol> x) const {
  return evaluate(a1_, true, u, x);
}

double ScoreSetEvaluator::beta(std::span<const Symbol> v, std::span<const Symbol> x) const {
  return evaluate(a2_, false, v, x);
}

std::size_t ScoreSetEvaluator::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

double ScoreSetEvaluator::evaluate(const ScoreSet& set, bool bob, std::span<const Symbol> a,
                                   std::span<const Symbol> x) const {
  if (a.size() != x.size()) throw InvalidArgument("sequence length mismatch");
  const std::size_t types = set.a_size * x_size_;
  std::vector<std::uint32_t> counts(types, 0);
  for (std::size_t t = 0; t < a.size(); ++t) ++counts[a[t] * x_size_ + x[t]];
  std::string key(1, bob ? 'b' : 'c');
  key.append(reinterpret_cast<const char*>(counts.data()), counts.size() * sizeof(std::uint32_t));
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }

  const std::size_t out = set.out_size;
  const std::vector<double>& pout = bob ? py_ : pz_;
  std::vector<LlrAtom> dist{{0.0, 1.0, 0.0}};
  for (std::size_t type = 0; type < types; ++type) {
    if (counts[type] == 0) continue;
    const std::size_t sym = type / x_size_, xx = type % x_size_;
    std::vector<LlrAtom> step;
    for (std::size_t y = 0; y < out; ++y) {
      double p = pout[xx * out + y];
      double s = set.score[sym * out + y];
      if (p <= 0.0 || !std::isfinite(s)) continue;
      step.push_back({s, p, 0.0});
    }
    step = merge_atoms(std::move(step));
    for (std::uint32_t c = 0; c < counts[type]; ++c) dist = convolve_atoms(dist, step);
  }
  double mass = 0.0;
  for (const auto& atom : dist)
    if (atom.llr >= set.threshold - set.tolerance) mass += atom.p;
  mass = std::min(mass, 1.0);

  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(std::move(key), mass);
  return mass;
}

EncodeOutcome encode(const Codebook& codebook, std::size_t m1, std::size_t m2,
                     const CellEvaluator& evaluator, double eps0, Symbol fallback_symbol) {
  if (m1 < 1 || m1 > codebook.messages1() || m2 < 1 || m2 > codebook.messages2()) {
    throw InvalidArgument("message pair out of range");
  }
  const double gate = 1.0 - 4.0 * eps0;
  EncodeOutcome out;
  const std::size_t k0 = codebook.row_band_begin(m1), l0 = codebook.col_band_begin(m2);
  const std::size_t kn = codebook.row_band_size(), ln = codebook.col_band_size();
  std::vector<Symbol> x;
  for (std::size_t k = k0; k < k0 + kn; ++k) {
    for (std::size_t l = l0; l < l0 + ln; ++l) {
      ++out.scanned;
      if (!codebook.indicator(k, l)) continue;
      codebook.codeword(k, l, x);
      if (x.empty()) continue;
      double a = evaluator.alpha(codebook.row(k), x);
      if (!(a > gate)) continue;
      double b = evaluator.beta(codebook.col(l), x);
      if (!(b > gate)) continue;
      out.fallback = false;
      out.k = k;
      out.l = l;
      out.x = std::move(x);
      out.alpha = a;
      out.beta = b;
      return out;
    }
  }
  out.x.assign(codebook.n(), fallback_symbol);
  out.alpha = -std::numeric_limits<double>::infinity();
  out.beta = -std::numeric_limits<double>::infinity();
  return out;
}

namespace {

ClassicalDecodeOutcome decode_classical(const Codebook& codebook, std::span<const Symbol> y,
                                        const ScoreSet& set, bool rows) {
  const std::size_t n = codebook.n();
  if (y.size() != n) throw InvalidArgument("received sequence has the wrong length");
  std::vector<double> table(n * set.a_size);
  for (std::size_t t = 0; t < n; ++t) {
    if (y[t] >= set.out_size) throw InvalidArgument("received symbol out of range");
    for (std::size_t a = 0; a < set.a_size; ++a)
      table[t * set.a_size + a] = set.score[a * set.out_size + y[t]];
  }
  const double cut = set.threshold - set.tolerance;
  const std::size_t entries = rows ? codebook.rows() : codebook.cols();
  ClassicalDecodeOutcome out;
  for (std::size_t k = 0; k < entries; ++k) {
    auto seq = rows ? codebook.row(k) : codebook.col(k);
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += table[t * set.a_size + seq[t]];
    if (s >= cut) out.matches.push_back(k);
  }
  if (!out.matches.empty()) {
    out.index = out.matches.front();
    out.message = rows ? codebook.row_message(*out.index) : codebook.col_message(*out.index);
  }
  return out;
}

}  // namespace

ClassicalDecodeOutcome decode_bob_classical(const Codebook& codebook, std::span<const Symbol> y,
                                            const ScoreSet& a1) {
  return decode_classical(codebook, y, a1, true);
}

ClassicalDecodeOutcome decode_charlie_classical(const Codebook& codebook,
                                                std::span<const Symbol> z, const ScoreSet& a2) {
  return decode_classical(codebook, z, a2, false);
}

// ---------------------------------------------------------------------------

namespace {

HermitianOperator pgm_completion(const std::vector<HermitianOperator>& lambdas,
                                 const std::vector<std::size_t>& counts,
                                 std::vector<HermitianOperator>& elements) {
  if (lambdas.empty()) throw InvalidArgument("decoder needs at least one operator");
  const std::size_t d = lambdas.front().dim();
  ComplexMatrix s = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    if (lambdas[a].dim() != d) throw InvalidArgument("decoder operators differ in dimension");
    if (!lambdas[a].is_psd(1e-9)) throw InvalidArgument("decoder operators must be PSD");
    s += static_cast<double>(counts[a]) * lambdas[a].matrix();
  }
  HermitianOperator sum(s, 1e-8);
  if (sum.max_eigenvalue() <= 0.0) throw InvalidArgument("decoder operators are all zero");
  const ComplexMatrix root = inverse_sqrt_on_support(sum).matrix();
  ComplexMatrix total = ComplexMatrix::Zero(s.rows(), s.cols());
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    ComplexMatrix t = root * lambdas[a].matrix() * root;
    t = 0.5 * (t + t.adjoint()).eval();
    total += static_cast<double>(counts[a]) * t;
    elements.emplace_back(t, 1e-8);
  }
  ComplexMatrix comp = ComplexMatrix::Identity(s.rows(), s.cols()) - total;
  comp = 0.5 * (comp + comp.adjoint()).eval();
  HermitianOperator completion(comp, 1e-8);
  if (completion.min_eigenvalue() < -1e-9) {
    throw ConvergenceError("pretty good measurement completion is not PSD");
  }
  return completion;
}

std::vector<std::size_t> symbol_counts(std::size_t symbols, const std::vector<Symbol>& entries) {
  std::vector<std::size_t> counts(symbols, 0);
  for (auto a : entries) {
    if (a >= symbols) throw InvalidArgument("codebook symbol has no decoding operator");
    ++counts[a];
  }
  return counts;
}

}  // namespace

QuantumDecoder::QuantumDecoder(std::vector<HermitianOperator> lambdas, std::vector<Symbol> entries)
    : lambdas_(std::move(lambdas)),
      entries_(std::move(entries)),
      counts_(symbol_counts(lambdas_.size(), entries_)),
      completion_(pgm_completion(lambdas_, counts_, elements_)) {}

const HermitianOperator& QuantumDecoder::element(std::size_t outcome) const {
  if (outcome == entries_.size()) return completion_;
  return elements_.at(entries_.at(outcome));
}

std::vector<double> QuantumDecoder::symbol_probabilities(const ComplexMatrix& rho) const {
  std::vector<double> p(elements_.size() + 1);
  for (std::size_t a = 0; a < elements_.size(); ++a)
    p[a] = counts_[a] > 0 ? std::max(0.0, trace_product(elements_[a].matrix(), rho)) : 0.0;
  p.back() = std::max(0.0, trace_product(completion_.matrix(), rho));
  return p;
}

std::vector<double> QuantumDecoder::outcome_probabilities(const DensityOperator& rho) const {
  auto ps = symbol_probabilities(rho.matrix());
  std::vector<double> out(entries_.size() + 1);
  for (std::size_t k = 0; k < entries_.size(); ++k) out[k] = ps[entries_[k]];
  out.back() = ps.back();
  return out;
}

namespace {

std::size_t sample_entry(const std::vector<Symbol>& entries, const std::vector<std::size_t>& counts,
                         const std::vector<double>& ps, SeededRng& rng) {
  double total = ps.back();
  for (std::size_t a = 0; a + 1 < ps.size(); ++a) total += static_cast<double>(counts[a]) * ps[a];
  if (std::abs(total - 1.0) > kProbabilitySlack) {
    throw InvalidArgument("measurement probabilities sum to " + std::to_string(total));
  }
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    acc += ps[entries[k]];
    if (u < acc) return k;
  }
  return entries.size();
}

}  // namespace

std::size_t QuantumDecoder::sample(const ComplexMatrix& rho, SeededRng& rng) const {
  return sample_entry(entries_, counts_, symbol_probabilities(rho), rng);
}

double QuantumDecoder::lambda_mass(const ComplexMatrix& rho) const {
  double s = 0.0;
  for (std::size_t a = 0; a < lambdas_.size(); ++a)
    if (counts_[a] > 0) s += static_cast<double>(counts_[a]) * trace_product(lambdas_[a].matrix(), rho);
  return s;
}

namespace {

QuantumDecodeOutcome outcome_for(const Codebook& codebook, std::size_t outcome,
                                 std::size_t completion, Receiver side) {
  QuantumDecodeOutcome out;
  out.outcome = outcome;
  out.failed = outcome == completion;
  if (!out.failed) {
    out.index = outcome;
    out.message = side == Receiver::bob ? codebook.row_message(outcome)
                                        : codebook.col_message(outcome);
  }
  return out;
}

}  // namespace

QuantumDecodeOutcome decode_quantum(const Codebook& codebook, const QuantumDecoder& decoder,
                                    const DensityOperator& state, Receiver side,
                                    SeededRng& rng) {
  if (state.dim() != decoder.dim()) throw InvalidArgument("state and decoder dimensions differ");
  std::size_t k = decoder.sample(state.matrix(), rng);
  return outcome_for(codebook, k, decoder.completion_outcome(), side);
}

JointQuantumOutcome decode_quantum_joint(const Codebook& codebook, const QuantumDecoder& bob,
                                         const QuantumDecoder& charlie,
                                         const DensityOperator& rho_bc, std::size_t dim_b,
                                         std::size_t dim_c, SeededRng& rng) {
  if (rho_bc.dim() != dim_b * dim_c || bob.dim() != dim_b || charlie.dim() != dim_c) {
    throw InvalidArgument("joint decoding dimension mismatch");
  }
  const std::array<std::size_t, 2> dims{dim_b, dim_c};
  const std::array<std::size_t, 1> keep_b{0}, keep_c{1};
  const ComplexMatrix rho_b = partial_trace(rho_bc.matrix(), dims, keep_b);
  const ComplexMatrix id_c = ComplexMatrix::Identity(static_cast<Eigen::Index>(dim_c),
                                                     static_cast<Eigen::Index>(dim_c));
  JointQuantumOutcome out;
  std::size_t k = bob.sample(rho_b, rng);
  out.bob = outcome_for(codebook, k, bob.completion_outcome(), Receiver::bob);
  const HermitianOperator& t = bob.element(k);
  ComplexMatrix post = partial_trace(ComplexMatrix(kron(t.matrix(), id_c) * rho_bc.matrix()),
                                     dims, keep_c);
  post = 0.5 * (post + post.adjoint()).eval();
  double p = post.trace().real();
  if (!(p > 0.0)) throw ConvergenceError("sampled a zero-probability measurement outcome");
  std::size_t l = charlie.sample(post / p, rng);
  out.charlie = outcome_for(codebook, l, charlie.completion_outcome(), Receiver::charlie);
  return out;
}

std::vector<HermitianOperator> lambda_blocks(const HermitianOperator& gamma,
                                             std::size_t classical_dim) {
  const std::size_t total = gamma.dim();
  if (classical_dim == 0 || total % classical_dim != 0) {
    throw InvalidArgument("classical dimension does not divide the test dimension");
  }
  const auto d = static_cast<Eigen::Index>(total / classical_dim);
  std::vector<HermitianOperator> out;
  for (std::size_t u = 0; u < classical_dim; ++u) {
    auto off = static_cast<Eigen::Index>(u) * d;
    out.emplace_back(ComplexMatrix(gamma.matrix().block(off, off, d, d)), 1e-8);
  }
  return out;
}

}  // namespace marton
