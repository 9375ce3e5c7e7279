#include "marton/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "marton/error.hpp"

namespace marton {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw InvalidArgument("eps must lie in [0, 1), got " + std::to_string(eps));
  }
}

double bits(double objective) {
  return objective > 0.0 ? -std::log2(objective)
                         : std::numeric_limits<double>::infinity();
}

struct Cell {
  std::size_t index;
  double p;
  double q;
  double llr;
};

std::vector<Cell> support_cells(const JointPmf& joint) {
  std::vector<Cell> out;
  const auto& pu = joint.row_marginal().probs();
  const auto& pv = joint.col_marginal().probs();
  for (std::size_t r = 0; r < joint.rows(); ++r) {
    for (std::size_t c = 0; c < joint.cols(); ++c) {
      double p = joint(r, c);
      if (p <= 0.0) continue;
      out.push_back({r * joint.cols() + c, p, pu[r] * pv[c], joint.llr(r, c)});
    }
  }
  return out;
}

// Neyman-Pearson fill over cells already in decreasing-ratio order.
DivergenceResult np_fill(const std::vector<Cell>& order, double eps, bool randomized) {
  const double need = 1.0 - eps;
  SetWitness w;
  double p_sum = 0.0;
  double q_sum = 0.0;
  for (const auto& cell : order) {
    if (p_sum >= need - kConstraintSlack) break;
    if (!randomized || p_sum + cell.p <= need + kConstraintSlack) {
      p_sum += cell.p;
      q_sum += cell.q;
      w.cells.push_back(cell.index);
      continue;
    }
    double frac = std::clamp((need - p_sum) / cell.p, 0.0, 1.0);
    w.boundary_cell = cell.index;
    w.boundary_weight = frac;
    p_sum += frac * cell.p;
    q_sum += frac * cell.q;
    break;
  }
  DivergenceResult res;
  res.epsilon = eps;
  res.method = randomized ? "randomized" : "greedy";
  res.constraint_mass = p_sum;
  res.objective = q_sum;
  res.value = bits(q_sum);
  res.witness = std::move(w);
  return res;
}

std::vector<Cell> descending(std::vector<Cell> cells) {
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& a, const Cell& b) { return a.llr > b.llr; });
  return cells;
}

DivergenceResult exhaustive_i0(const std::vector<Cell>& cells, double eps) {
  const std::size_t m = cells.size();
  if (m > kExhaustiveCellLimit) {
    throw CapExceeded("exhaustive search supports at most " +
                          std::to_string(kExhaustiveCellLimit) +
                          " support cells, got " + std::to_string(m));
  }
  const double need = 1.0 - eps - kConstraintSlack;
  const std::size_t lo_bits = m / 2;
  const std::size_t hi_bits = m - lo_bits;

  struct Half {
    double p;
    double q;
    std::uint32_t mask;
  };
  auto enumerate = [&](std::size_t offset, std::size_t count) {
    std::vector<Half> out(std::size_t{1} << count);
    for (std::uint32_t mask = 0; mask < out.size(); ++mask) {
      double p = 0.0, q = 0.0;
      for (std::size_t b = 0; b < count; ++b) {
        if (mask >> b & 1u) {
          p += cells[offset + b].p;
          q += cells[offset + b].q;
        }
      }
      out[mask] = {p, q, mask};
    }
    return out;
  };

  std::vector<Half> low = enumerate(0, lo_bits);
  std::vector<Half> high = enumerate(lo_bits, hi_bits);
  std::sort(low.begin(), low.end(), [](const Half& a, const Half& b) {
    return a.p < b.p || (a.p == b.p && a.mask < b.mask);
  });
  // suffix_best[i]: entry of low[i..] with the smallest q.
  std::vector<std::size_t> suffix_best(low.size());
  suffix_best.back() = low.size() - 1;
  for (std::size_t i = low.size() - 1; i-- > 0;) {
    std::size_t j = suffix_best[i + 1];
    suffix_best[i] = low[i].q <= low[j].q ? i : j;
  }

  const double inf = std::numeric_limits<double>::infinity();
  double best_q = inf;
  std::uint64_t best_key = 0;  // (high mask << 32) | low mask

  const std::int64_t hn = static_cast<std::int64_t>(high.size());
#pragma omp parallel
  {
    double local_q = inf;
    std::uint64_t local_key = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t h = 0; h < hn; ++h) {
      const Half& hi = high[static_cast<std::size_t>(h)];
      double want = need - hi.p;
      auto it = std::lower_bound(low.begin(), low.end(), want,
                                 [](const Half& a, double v) { return a.p < v; });
      if (it == low.end()) continue;
      const Half& lo = low[suffix_best[static_cast<std::size_t>(it - low.begin())]];
      double q = hi.q + lo.q;
      std::uint64_t key = (std::uint64_t{hi.mask} << 32) | lo.mask;
      if (q < local_q || (q == local_q && key < local_key)) {
        local_q = q;
        local_key = key;
      }
    }
#pragma omp critical
    {
      if (local_q < best_q || (local_q == best_q && local_key < best_key)) {
        best_q = local_q;
        best_key = local_key;
      }
    }
  }
  if (best_q == inf) throw ConvergenceError("exhaustive search found no feasible set");

  SetWitness w;
  double p_sum = 0.0;
  const auto lo_mask = static_cast<std::uint32_t>(best_key & 0xffffffffu);
  const auto hi_mask = static_cast<std::uint32_t>(best_key >> 32);
  for (std::size_t b = 0; b < m; ++b) {
    bool in = b < lo_bits ? (lo_mask >> b & 1u) : (hi_mask >> (b - lo_bits) & 1u);
    if (in) {
      w.cells.push_back(cells[b].index);
      p_sum += cells[b].p;
    }
  }
  std::sort(w.cells.begin(), w.cells.end());
  DivergenceResult res;
  res.epsilon = eps;
  res.method = "exhaustive";
  res.constraint_mass = p_sum;
  res.objective = best_q;
  res.value = bits(best_q);
  res.witness = std::move(w);
  return res;
}

}  // namespace

std::string to_string(I0Method m) {
  switch (m) {
    case I0Method::greedy: return "greedy";
    case I0Method::exhaustive: return "exhaustive";
    case I0Method::randomized: return "randomized";
  }
  return "unknown";
}

I0Method parse_i0_method(const std::string& s) {
  if (s == "greedy") return I0Method::greedy;
  if (s == "exhaustive") return I0Method::exhaustive;
  if (s == "randomized") return I0Method::randomized;
  throw InvalidArgument("unknown I0 method '" + s +
                        "' (expected greedy, exhaustive or randomized)");
}

DivergenceResult classical_i_infty(const JointPmf& joint, double eps) {
  check_eps(eps);
  std::vector<Cell> cells = support_cells(joint);
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& a, const Cell& b) { return a.llr < b.llr; });
  const double need = 1.0 - eps;
  SetWitness w;
  double p_sum = 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& cell : cells) {
    if (p_sum >= need - kConstraintSlack) break;
    p_sum += cell.p;
    top = cell.llr;
    w.cells.push_back(cell.index);
  }
  DivergenceResult res;
  res.epsilon = eps;
  res.method = "lower-set";
  res.constraint_mass = p_sum;
  res.value = top;
  res.objective = std::exp2(top);
  res.witness = std::move(w);
  return res;
}

DivergenceResult classical_i0(const JointPmf& joint, double eps, I0Method method) {
  check_eps(eps);
  std::vector<Cell> cells = support_cells(joint);
  switch (method) {
    case I0Method::exhaustive:
      return exhaustive_i0(cells, eps);
    case I0Method::randomized:
      return np_fill(descending(std::move(cells)), eps, true);
    case I0Method::greedy: {
      auto order = descending(std::move(cells));
      DivergenceResult res = np_fill(order, eps, false);
      res.upper_bound = np_fill(order, eps, true).value;
      return res;
    }
  }
  throw InvalidArgument("unknown I0 method");
}

double reevaluate(const JointPmf& joint, const DivergenceResult& result) {
  const auto* w = std::get_if<SetWitness>(&result.witness);
  if (w == nullptr) throw InvalidArgument("result does not carry a set witness");
  const auto& pu = joint.row_marginal().probs();
  const auto& pv = joint.col_marginal().probs();
  const double need = 1.0 - result.epsilon;
  auto cell_p = [&](std::size_t i) { return joint.probs().at(i); };
  auto cell_q = [&](std::size_t i) {
    return pu[i / joint.cols()] * pv[i % joint.cols()];
  };
  double p_sum = 0.0;
  if (result.method == "lower-set") {
    double top = -std::numeric_limits<double>::infinity();
    for (auto i : w->cells) {
      p_sum += cell_p(i);
      top = std::max(top, joint.llr(i / joint.cols(), i % joint.cols()));
    }
    if (p_sum < need - 1e-9) throw InvalidArgument("witness mass below 1 - eps");
    return top;
  }
  double q_sum = 0.0;
  for (auto i : w->cells) {
    p_sum += cell_p(i);
    q_sum += cell_q(i);
  }
  if (w->boundary_cell) {
    p_sum += w->boundary_weight * cell_p(*w->boundary_cell);
    q_sum += w->boundary_weight * cell_q(*w->boundary_cell);
  }
  if (p_sum < need - 1e-9) throw InvalidArgument("witness mass below 1 - eps");
  return bits(q_sum);
}

CqBlocks split_cq(const ComplexMatrix& cq, std::size_t classical_dim, double tolerance) {
  const auto total = static_cast<std::size_t>(cq.rows());
  if (classical_dim == 0 || total % classical_dim != 0) {
    throw InvalidArgument("classical dimension " + std::to_string(classical_dim) +
                          " does not divide state dimension " + std::to_string(total));
  }
  const std::size_t d = total / classical_dim;
  CqBlocks out;
  out.marginal = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const auto di = static_cast<Eigen::Index>(d);
  for (std::size_t u = 0; u < classical_dim; ++u) {
    for (std::size_t v = 0; v < classical_dim; ++v) {
      if (u == v) continue;
      auto off = cq.block(static_cast<Eigen::Index>(u * d), static_cast<Eigen::Index>(v * d), di, di);
      if (off.cwiseAbs().maxCoeff() > tolerance) {
        throw InvalidArgument("state is not classical on the first factor (block " +
                              std::to_string(u) + "," + std::to_string(v) + ")");
      }
    }
    ComplexMatrix blk = cq.block(static_cast<Eigen::Index>(u * d), static_cast<Eigen::Index>(u * d), di, di);
    out.weights.push_back(blk.trace().real());
    out.marginal += blk;
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

namespace {

struct NpEvaluation {
  double mass_gt = 0.0;
  double mass_ge = 0.0;
  std::vector<Eigen::SelfAdjointEigenSolver<ComplexMatrix>> solvers;
  std::vector<double> tol;
};

NpEvaluation evaluate_np(const CqBlocks& cq, double lambda) {
  NpEvaluation ev;
  for (std::size_t u = 0; u < cq.blocks.size(); ++u) {
    ComplexMatrix diff = cq.blocks[u] - lambda * cq.weights[u] * cq.marginal;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff);
    const auto& vals = es.eigenvalues();
    double tol = 1e-10 * cq.weights[u] * (1.0 + lambda) + 1e-15;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      if (vals[i] < -tol) continue;
      auto v = es.eigenvectors().col(i);
      double mass = (v.adjoint() * cq.blocks[u] * v)(0, 0).real();
      ev.mass_ge += mass;
      if (vals[i] > tol) ev.mass_gt += mass;
    }
    ev.tol.push_back(tol);
    ev.solvers.push_back(std::move(es));
  }
  return ev;
}

}  // namespace

DivergenceResult quantum_i0(const DensityOperator& cq, std::size_t classical_dim, double eps) {
  check_eps(eps);
  const CqBlocks blocks = split_cq(cq.matrix(), classical_dim);
  const double need = 1.0 - eps - kConstraintSlack;

  double hi = 1.0;
  int doublings = 0;
  while (evaluate_np(blocks, hi).mass_ge >= need) {
    hi *= 2.0;
    if (++doublings > 1000) throw ConvergenceError("quantum I0: lambda bracket diverged");
  }
  double lo = doublings > 0 ? hi / 2.0 : 0.0;
  for (int it = 0; it < 200; ++it) {
    if (lo > 0.0 && hi - lo <= 1e-14 * hi) break;
    double mid = lo > 0.0 ? std::sqrt(lo * hi) : hi / 2.0;
    if (evaluate_np(blocks, mid).mass_ge >= need) lo = mid;
    else hi = mid;
  }

  NpEvaluation ev = evaluate_np(blocks, lo);
  double w = 0.0;
  double eq_mass = ev.mass_ge - ev.mass_gt;
  if (ev.mass_gt < need && eq_mass > 0.0) {
    w = std::clamp((1.0 - eps - ev.mass_gt) / eq_mass, 0.0, 1.0);
  }

  const std::size_t d = blocks.marginal.rows();
  const auto di = static_cast<Eigen::Index>(d);
  ComplexMatrix gamma = ComplexMatrix::Zero(static_cast<Eigen::Index>(classical_dim * d),
                                            static_cast<Eigen::Index>(classical_dim * d));
  double mass = 0.0;
  double objective = 0.0;
  std::size_t rank_eq = 0;
  for (std::size_t u = 0; u < classical_dim; ++u) {
    const auto& es = ev.solvers[u];
    ComplexMatrix g = ComplexMatrix::Zero(di, di);
    for (Eigen::Index i = 0; i < di; ++i) {
      double val = es.eigenvalues()[i];
      double weight = val > ev.tol[u] ? 1.0 : (val >= -ev.tol[u] ? w : 0.0);
      if (std::abs(val) <= ev.tol[u]) ++rank_eq;
      if (weight == 0.0) continue;
      auto v = es.eigenvectors().col(i);
      g += weight * v * v.adjoint();
    }
    mass += trace_product(g, blocks.blocks[u]);
    objective += blocks.weights[u] * trace_product(g, blocks.marginal);
    gamma.block(static_cast<Eigen::Index>(u * d), static_cast<Eigen::Index>(u * d), di, di) = g;
  }

  DivergenceResult res;
  res.epsilon = eps;
  res.method = "quantum-np";
  res.constraint_mass = mass;
  res.objective = objective;
  res.value = bits(objective);
  res.witness = OperatorWitness{HermitianOperator(gamma, 1e-8), lo, w, rank_eq};
  return res;
}

double reevaluate(const DensityOperator& cq, std::size_t classical_dim,
                  const DivergenceResult& result) {
  const auto* w = std::get_if<OperatorWitness>(&result.witness);
  if (w == nullptr) throw InvalidArgument("result does not carry an operator witness");
  const HermitianOperator& gamma = w->test;
  if (gamma.dim() != cq.dim()) throw InvalidArgument("witness dimension mismatch");
  if (gamma.min_eigenvalue() < -1e-9 || gamma.max_eigenvalue() > 1.0 + 1e-9) {
    throw InvalidArgument("witness is not a test (0 <= Gamma <= I violated)");
  }
  const CqBlocks blocks = split_cq(cq.matrix(), classical_dim);
  const auto d = static_cast<Eigen::Index>(blocks.marginal.rows());
  ComplexMatrix sigma = ComplexMatrix::Zero(cq.matrix().rows(), cq.matrix().cols());
  for (std::size_t u = 0; u < classical_dim; ++u) {
    sigma.block(static_cast<Eigen::Index>(u) * d, static_cast<Eigen::Index>(u) * d, d, d) =
        blocks.weights[u] * blocks.marginal;
  }
  double mass = trace_product(gamma.matrix(), cq.matrix());
  if (mass < 1.0 - result.epsilon - 1e-9) {
    throw InvalidArgument("witness mass below 1 - eps");
  }
  return bits(trace_product(gamma.matrix(), sigma));
}

// ---------------------------------------------------------------------------

std::vector<LlrAtom> merge_atoms(std::vector<LlrAtom> atoms, double resolution) {
  std::sort(atoms.begin(), atoms.end(),
            [](const LlrAtom& a, const LlrAtom& b) { return a.llr < b.llr; });
  std::vector<LlrAtom> out;
  std::size_t i = 0;
  while (i < atoms.size()) {
    const double start = atoms[i].llr;
    double p = 0.0, q = 0.0, weighted = 0.0;
    std::size_t j = i;
    for (; j < atoms.size() && (atoms[j].llr == start || atoms[j].llr - start <= resolution);
         ++j) {
      p += atoms[j].p;
      q += atoms[j].q;
      weighted += atoms[j].p * atoms[j].llr;
    }
    out.push_back({p > 0.0 ? weighted / p : start, p, q});
    i = j;
  }
  return out;
}

std::vector<LlrAtom> convolve_atoms(std::span<const LlrAtom> a, std::span<const LlrAtom> b,
                                    double resolution, std::size_t cap) {
  std::vector<LlrAtom> raw;
  raw.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) raw.push_back({x.llr + y.llr, x.p * y.p, x.q * y.q});
  }
  auto merged = merge_atoms(std::move(raw), resolution);
  if (merged.size() > cap) {
    throw CapExceeded("LLR spectrum has " + std::to_string(merged.size()) +
                      " atoms, cap is " + std::to_string(cap));
  }
  return merged;
}

LlrSpectrum llr_spectrum(const JointPmf& base) {
  LlrSpectrum s;
  const auto& pu = base.row_marginal().probs();
  const auto& pv = base.col_marginal().probs();
  std::vector<LlrAtom> atoms;
  for (std::size_t r = 0; r < base.rows(); ++r) {
    for (std::size_t c = 0; c < base.cols(); ++c) {
      double q = pu[r] * pv[c];
      if (base(r, c) > 0.0) atoms.push_back({base.llr(r, c), base(r, c), q});
      else s.null_q += q;
    }
  }
  s.atoms = merge_atoms(std::move(atoms));
  return s;
}

LlrSpectrum iid_llr_spectrum(const JointPmf& base, std::size_t n, std::size_t cap) {
  if (n == 0) throw InvalidArgument("block length must be positive");
  LlrSpectrum one = llr_spectrum(base);
  LlrSpectrum acc = one;
  for (std::size_t k = 1; k < n; ++k) {
    acc.atoms = convolve_atoms(acc.atoms, one.atoms, kLlrResolution, cap);
  }
  double q_total = 0.0;
  for (const auto& a : acc.atoms) q_total += a.q;
  acc.null_q = std::max(0.0, 1.0 - q_total);
  acc.n = n;
  return acc;
}

namespace {

DivergenceResult spectrum_i0(const LlrSpectrum& s, double eps, bool randomized) {
  check_eps(eps);
  const double need = 1.0 - eps;
  double p_sum = 0.0, q_sum = 0.0;
  ThresholdWitness w{std::numeric_limits<double>::infinity(), 1.0};
  for (auto it = s.atoms.rbegin(); it != s.atoms.rend(); ++it) {
    if (p_sum >= need - kConstraintSlack) break;
    w.threshold = it->llr;
    if (!randomized || p_sum + it->p <= need + kConstraintSlack) {
      p_sum += it->p;
      q_sum += it->q;
      continue;
    }
    w.boundary_weight = std::clamp((need - p_sum) / it->p, 0.0, 1.0);
    p_sum += w.boundary_weight * it->p;
    q_sum += w.boundary_weight * it->q;
    break;
  }
  DivergenceResult res;
  res.epsilon = eps;
  res.method = randomized ? "iid-randomized" : "iid-threshold";
  res.constraint_mass = p_sum;
  res.objective = q_sum;
  res.value = bits(q_sum);
  res.witness = w;
  return res;
}

}  // namespace

DivergenceResult classical_i0_iid(const LlrSpectrum& spectrum, double eps) {
  return spectrum_i0(spectrum, eps, true);
}

DivergenceResult classical_i0_iid(const JointPmf& base, std::size_t n, double eps) {
  return classical_i0_iid(iid_llr_spectrum(base, n), eps);
}

DivergenceResult classical_i0_iid_threshold(const LlrSpectrum& spectrum, double eps) {
  return spectrum_i0(spectrum, eps, false);
}

DivergenceResult classical_i_infty_iid(const LlrSpectrum& s, double eps) {
  check_eps(eps);
  const double need = 1.0 - eps;
  double p_sum = 0.0;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& a : s.atoms) {
    if (p_sum >= need - kConstraintSlack) break;
    p_sum += a.p;
    top = a.llr;
  }
  DivergenceResult res;
  res.epsilon = eps;
  res.method = "iid-lower-set";
  res.constraint_mass = p_sum;
  res.value = top;
  res.objective = std::exp2(top);
  res.witness = ThresholdWitness{top, 1.0};
  return res;
}

DivergenceResult classical_i_infty_iid(const JointPmf& base, std::size_t n, double eps) {
  return classical_i_infty_iid(iid_llr_spectrum(base, n), eps);
}

double reevaluate(const LlrSpectrum& s, const DivergenceResult& result) {
  const auto* w = std::get_if<ThresholdWitness>(&result.witness);
  if (w == nullptr) throw InvalidArgument("result does not carry a threshold witness");
  const double need = 1.0 - result.epsilon;
  double p_sum = 0.0, q_sum = 0.0;
  if (result.method == "iid-lower-set") {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& a : s.atoms) {
      if (a.llr > w->threshold + kLlrResolution) break;
      p_sum += a.p;
      top = a.llr;
    }
    if (p_sum < need - 1e-9) throw InvalidArgument("witness mass below 1 - eps");
    return top;
  }
  for (const auto& a : s.atoms) {
    if (a.llr > w->threshold + kLlrResolution) {
      p_sum += a.p;
      q_sum += a.q;
    } else if (a.llr >= w->threshold - kLlrResolution) {
      p_sum += w->boundary_weight * a.p;
      q_sum += w->boundary_weight * a.q;
    }
  }
  if (p_sum < need - 1e-9) throw InvalidArgument("witness mass below 1 - eps");
  return bits(q_sum);
}

}  // namespace marton
