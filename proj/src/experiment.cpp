#include "marton/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>

#include "marton/error.hpp"
#include "marton/rng.hpp"

namespace marton {

namespace {

ScoreSet decoding_set(const JointPmf& joint, const DivergenceResult& r, std::size_t n) {
  if (n == 1) return score_set_from_witness(joint, std::get<SetWitness>(r.witness));
  return score_set_from_threshold(joint, std::get<ThresholdWitness>(r.witness).threshold, n);
}

DivergenceResult set_i0(const JointPmf& joint, std::size_t n, double eps, I0Method method) {
  if (n == 1) {
    if (method == I0Method::randomized) {
      throw InvalidArgument("decoding sets need a set-based I0 method (greedy or exhaustive)");
    }
    return classical_i0(joint, eps, method);
  }
  return classical_i0_iid_threshold(iid_llr_spectrum(joint, n), eps);
}

}  // namespace

ClassicalInstance prepare_classical(ClassicalBroadcastChannel channel, InputDesign design,
                                    std::size_t n, double eps0, double eps_infty,
                                    I0Method method) {
  if (n == 0) throw InvalidArgument("block length must be positive");
  auto [p_uy, p_vz] = build_classical_joints(channel, design);
  DivergenceResult i_inf = n == 1 ? classical_i_infty(design.uv(), eps_infty)
                                  : classical_i_infty_iid(design.uv(), n, eps_infty);
  DivergenceResult i0b = set_i0(p_uy, n, eps0, method);
  DivergenceResult i0c = set_i0(p_vz, n, eps0, method);
  ScoreSet a1 = decoding_set(p_uy, i0b, n);
  ScoreSet a2 = decoding_set(p_vz, i0c, n);
  auto evaluator = std::make_shared<const ScoreSetEvaluator>(channel, a1, a2);
  return ClassicalInstance{std::move(channel), std::move(design), n, eps0, eps_infty,
                           std::move(p_uy), std::move(p_vz), std::move(i_inf), std::move(i0b),
                           std::move(i0c), std::move(a1), std::move(a2), std::move(evaluator)};
}

QuantumInstance prepare_quantum(CqBroadcastChannel channel, InputDesign design, double eps0,
                                double eps_infty) {
  DensityOperator rho_ub = build_ub_state(channel, design);
  DensityOperator rho_vc = build_vc_state(channel, design);
  DivergenceResult i_inf = classical_i_infty(design.uv(), eps_infty);
  DivergenceResult i0b = quantum_i0(rho_ub, design.u_size(), eps0);
  DivergenceResult i0c = quantum_i0(rho_vc, design.v_size(), eps0);
  auto lambda_b = lambda_blocks(std::get<OperatorWitness>(i0b.witness).test, design.u_size());
  auto lambda_c = lambda_blocks(std::get<OperatorWitness>(i0c.witness).test, design.v_size());
  const std::size_t nx = channel.x_size();
  std::vector<double> alpha(design.u_size() * nx), beta(design.v_size() * nx);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < design.u_size(); ++u)
      alpha[u * nx + x] = trace_product(lambda_b[u].matrix(), channel.bob_state(x).matrix());
    for (std::size_t v = 0; v < design.v_size(); ++v)
      beta[v * nx + x] = trace_product(lambda_c[v].matrix(), channel.charlie_state(x).matrix());
  }
  auto evaluator = std::make_shared<const TableEvaluator>(std::move(alpha), std::move(beta), nx);
  return QuantumInstance{std::move(channel), std::move(design), eps0, eps_infty,
                         std::move(rho_ub), std::move(rho_vc), std::move(i_inf), std::move(i0b),
                         std::move(i0c), std::move(lambda_b), std::move(lambda_c),
                         std::move(evaluator)};
}

namespace {

template <class Inst>
RateParams params_of(const Inst& inst, int R1, int R2, int r1, int r2, double eps_tilde) {
  RateParams p;
  p.R1 = R1;
  p.R2 = R2;
  p.r1 = r1;
  p.r2 = r2;
  p.eps_tilde = eps_tilde;
  p.eps0 = inst.eps0;
  p.eps_infty = inst.eps_infty;
  p.I_inf = inst.i_inf.value;
  p.I0B = inst.i0b.value;
  p.I0C = inst.i0c.value;
  return p;
}

}  // namespace

RateParams rate_params(const ClassicalInstance& inst, int R1, int R2, int r1, int r2,
                       double eps_tilde) {
  return params_of(inst, R1, R2, r1, r2, eps_tilde);
}

RateParams rate_params(const QuantumInstance& inst, int R1, int R2, int r1, int r2,
                       double eps_tilde) {
  return params_of(inst, R1, R2, r1, r2, eps_tilde);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_stream(master, static_cast<std::uint64_t>(trial) + 1);
}

std::uint64_t codebook_seed(std::uint64_t master, std::size_t trial, bool resample) {
  return resample ? derive_stream(trial_seed(master, trial), 0x636f6465626f6f6bull)
                  : derive_stream(master, 0);
}

BoundCheck make_check(std::string event, std::string bound, double value, const Estimate& est,
                      bool applicable) {
  BoundCheck c;
  c.event = std::move(event);
  c.bound = std::move(bound);
  c.value = value;
  c.estimate = est;
  c.applicable = applicable;
  const double b = std::clamp(value, 0.0, 1.0);
  const double n = static_cast<double>(std::max<std::uint64_t>(est.trials, 1));
  const double sigma = std::max(est.sigma, std::sqrt(b * (1.0 - b) / n));
  c.within_3sigma = est.rate <= value + 3.0 * sigma;
  c.violated = applicable && est.lower_one_sided > value;
  return c;
}

bool ExperimentReport::any_violation() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const BoundCheck& c) { return c.applicable && c.violated; });
}

const BoundCheck* ExperimentReport::find_check(const std::string& event,
                                               const std::string& bound) const {
  for (const auto& c : checks)
    if (c.event == event && c.bound == bound) return &c;
  return nullptr;
}

namespace {

struct TrialRecord {
  bool e1 = false, e2b = false, e2c = false, e3b = false, e3c = false;
  bool e2 = false, e3 = false;
  bool bob_msg = false, charlie_msg = false, msg = false, idx = false;
  double exact_e2 = 0.0, exact_e3 = 0.0, hn_b = 0.0, hn_c = 0.0;
  std::uint64_t scanned = 0;
  std::uint64_t digest = 0;
};

template <class Body>
std::vector<TrialRecord> run_trials(std::size_t trials, bool parallel, Body body) {
  std::vector<TrialRecord> records(trials);
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      records[static_cast<std::size_t>(t)] = body(static_cast<std::size_t>(t));
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return records;
}

EventCounts aggregate(const std::vector<TrialRecord>& records, std::uint64_t& digest,
                      bool resample) {
  EventCounts c;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& r : records) {
    ++c.trials;
    c.e1 += r.e1;
    c.e2b += r.e2b;
    c.e2c += r.e2c;
    c.e3b += r.e3b;
    c.e3c += r.e3c;
    c.e2 += r.e2;
    c.e3 += r.e3;
    c.bob_message_error += r.bob_msg;
    c.charlie_message_error += r.charlie_msg;
    c.message_error += r.msg;
    c.index_error += r.idx;
    c.scanned += r.scanned;
    c.exact_e2_sum += r.exact_e2;
    c.exact_e3_sum += r.exact_e3;
    c.hn_b_sum += r.hn_b;
    c.hn_c_sum += r.hn_c;
    if (resample) h = (h ^ r.digest) * 0x100000001b3ull;
  }
  digest = resample ? h : (records.empty() ? 0 : records.front().digest);
  return c;
}

std::pair<std::size_t, std::size_t> draw_messages(const Codebook& cb, std::uint64_t seed) {
  SeededRng rng(seed, streams::kMessages);
  std::size_t m1 = 1 + rng.below(cb.messages1());
  std::size_t m2 = 1 + rng.below(cb.messages2());
  return {m1, m2};
}

CodebookSpec spec_of(const RateParams& p, std::size_t n) {
  return CodebookSpec{p.R1, p.R2, p.r1, p.r2, n, p.I_inf};
}

ExperimentReport base_report(Setting setting, std::size_t n, const RateParams& params,
                             const ExperimentOptions& options) {
  ExperimentReport rep;
  rep.setting = setting;
  rep.n = n;
  rep.params = params;
  rep.trials = options.trials;
  rep.seed = options.seed;
  rep.resample_codebook = options.resample_codebook;
  rep.bounds = event_bounds(params);
  rep.band_checks = band_constraints(params);
  rep.rate_checks = rate_constraints(params);
  rep.theorem_hypotheses = rep.bounds.bands_valid && all_hold(rep.rate_checks) &&
                           params.eps_infty <= 0.25;
  return rep;
}

}  // namespace

ExperimentReport run_experiment(const ClassicalInstance& inst, const RateParams& params,
                                const ExperimentOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep = base_report(Setting::classical, inst.n, params, options);
  const CodebookSpec spec = spec_of(params, inst.n);
  std::unique_ptr<Codebook> fixed;
  if (!options.resample_codebook) {
    fixed = std::make_unique<Codebook>(inst.design, spec, codebook_seed(options.seed, 0, false));
  }
  ProductChannelView channel(inst.channel, inst.n);

  auto body = [&](std::size_t trial) {
    TrialRecord rec;
    const std::uint64_t ts = trial_seed(options.seed, trial);
    std::unique_ptr<Codebook> own;
    if (options.resample_codebook) {
      own = std::make_unique<Codebook>(inst.design, spec,
                                       codebook_seed(options.seed, trial, true));
    }
    const Codebook& cb = own ? *own : *fixed;
    rec.digest = cb.digest();
    auto [m1, m2] = draw_messages(cb, ts);
    EncodeOutcome enc = encode(cb, m1, m2, *inst.evaluator, inst.eps0, 0);
    rec.scanned = enc.scanned;
    std::vector<Symbol> y(inst.n), z(inst.n);
    SeededRng ch_rng(ts, streams::kChannel);
    channel.sample_output(enc.x.data(), ch_rng, y.data(), z.data());
    ClassicalDecodeOutcome db = decode_bob_classical(cb, y, inst.a1);
    ClassicalDecodeOutcome dc = decode_charlie_classical(cb, z, inst.a2);
    rec.e1 = enc.fallback;
    if (!rec.e1) {
      rec.e2b = !inst.a1.contains(cb.row(enc.k), y);
      rec.e2c = !inst.a2.contains(cb.col(enc.l), z);
      rec.e3b = std::any_of(db.matches.begin(), db.matches.end(),
                            [&](std::size_t k) { return k != enc.k; });
      rec.e3c = std::any_of(dc.matches.begin(), dc.matches.end(),
                            [&](std::size_t l) { return l != enc.l; });
    }
    rec.bob_msg = db.message != m1;
    rec.charlie_msg = dc.message != m2;
    rec.msg = rec.bob_msg || rec.charlie_msg;
    rec.idx = rec.e1 || db.index != enc.k || dc.index != enc.l;
    return rec;
  };

  auto records = run_trials(options.trials, options.parallel, body);
  rep.counts = aggregate(records, rep.codebook_digest, options.resample_codebook);

  const auto& c = rep.counts;
  const auto& b = rep.bounds;
  const std::uint64_t N = c.trials;
  const bool covering_ok = params.eps_infty <= 0.25;
  auto e1 = estimate(c.e1, N), e2b = estimate(c.e2b, N), e2c = estimate(c.e2c, N);
  auto e3b = estimate(c.e3b, N), e3c = estimate(c.e3c, N);
  auto msg = estimate(c.message_error, N);
  rep.rates = {{"E1", e1},
               {"E2B", e2b},
               {"E2C", e2c},
               {"E3B", e3b},
               {"E3C", e3c},
               {"bob message error", estimate(c.bob_message_error, N)},
               {"charlie message error", estimate(c.charlie_message_error, N)},
               {"message error", msg},
               {"index error", estimate(c.index_error, N)}};
  rep.checks = {
      make_check("E1", "covering", b.e1, e1, covering_ok),
      make_check("E1", "36 eps~", b.e1_eps, e1, covering_ok && b.bands_valid),
      make_check("E2B", "4 eps0", b.e2_classical, e2b, true),
      make_check("E2C", "4 eps0", b.e2_classical, e2c, true),
      make_check("E3B", "chain", b.e3b_chain, e3b, true),
      make_check("E3C", "chain", b.e3c_chain, e3c, true),
      make_check("E3B", "eps~", b.e3_eps_derived, e3b, b.bands_valid),
      make_check("E3C", "eps~", b.e3_eps_derived, e3c, b.bands_valid),
      make_check("E3B", "eps~/2 (claimed)", b.e3_eps_claimed, e3b, false),
      make_check("E3C", "eps~/2 (claimed)", b.e3_eps_claimed, e3c, false),
      make_check("message error", "union of intermediate bounds",
                 b.e1 + 2 * b.e2_classical + b.e3b_chain + b.e3c_chain, msg, covering_ok),
      make_check("message error", "37 eps~ + 8 eps0", b.total_classical, msg,
                 rep.theorem_hypotheses),
  };
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport run_experiment(const QuantumInstance& inst, const RateParams& params,
                                const ExperimentOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep = base_report(Setting::quantum, 1, params, options);
  const CodebookSpec spec = spec_of(params, 1);
  const std::size_t db = inst.channel.dim_b(), dc = inst.channel.dim_c();

  struct Decoders {
    std::unique_ptr<Codebook> cb;
    std::unique_ptr<QuantumDecoder> bob, charlie;
  };
  auto make = [&](std::uint64_t seed) {
    Decoders d;
    d.cb = std::make_unique<Codebook>(inst.design, spec, seed);
    std::vector<Symbol> rows(d.cb->rows()), cols(d.cb->cols());
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = d.cb->row(k)[0];
    for (std::size_t l = 0; l < cols.size(); ++l) cols[l] = d.cb->col(l)[0];
    d.bob = std::make_unique<QuantumDecoder>(inst.lambda_b, std::move(rows));
    d.charlie = std::make_unique<QuantumDecoder>(inst.lambda_c, std::move(cols));
    return d;
  };
  Decoders fixed;
  if (!options.resample_codebook) fixed = make(codebook_seed(options.seed, 0, false));

  auto body = [&](std::size_t trial) {
    TrialRecord rec;
    const std::uint64_t ts = trial_seed(options.seed, trial);
    Decoders own;
    if (options.resample_codebook) own = make(codebook_seed(options.seed, trial, true));
    const Decoders& d = options.resample_codebook ? own : fixed;
    const Codebook& cb = *d.cb;
    rec.digest = cb.digest();
    auto [m1, m2] = draw_messages(cb, ts);
    EncodeOutcome enc = encode(cb, m1, m2, *inst.evaluator, inst.eps0, 0);
    rec.scanned = enc.scanned;
    const std::size_t x = enc.x[0];
    SeededRng meas(ts, streams::kMeasure);
    JointQuantumOutcome out =
        decode_quantum_joint(cb, *d.bob, *d.charlie, inst.channel.state(x), db, dc, meas);
    rec.e1 = enc.fallback;
    if (!rec.e1) {
      rec.e2 = out.bob.index != enc.k;
      rec.e3 = out.charlie.index != enc.l;
      const ComplexMatrix& rb = inst.channel.bob_state(x).matrix();
      const ComplexMatrix& rc = inst.channel.charlie_state(x).matrix();
      const Symbol u = cb.row(enc.k)[0], v = cb.col(enc.l)[0];
      rec.exact_e2 = 1.0 - trace_product(d.bob->element_for_symbol(u).matrix(), rb);
      rec.exact_e3 = 1.0 - trace_product(d.charlie->element_for_symbol(v).matrix(), rc);
      const double own_b = trace_product(d.bob->lambda(u).matrix(), rb);
      const double own_c = trace_product(d.charlie->lambda(v).matrix(), rc);
      rec.hn_b = 2.0 * (1.0 - own_b) + 4.0 * (d.bob->lambda_mass(rb) - own_b);
      rec.hn_c = 2.0 * (1.0 - own_c) + 4.0 * (d.charlie->lambda_mass(rc) - own_c);
    }
    rec.bob_msg = out.bob.message != m1;
    rec.charlie_msg = out.charlie.message != m2;
    rec.msg = rec.bob_msg || rec.charlie_msg;
    rec.idx = rec.e1 || rec.e2 || rec.e3;
    return rec;
  };

  auto records = run_trials(options.trials, options.parallel, body);
  rep.counts = aggregate(records, rep.codebook_digest, options.resample_codebook);

  const auto& c = rep.counts;
  const auto& b = rep.bounds;
  const std::uint64_t N = c.trials;
  const bool covering_ok = params.eps_infty <= 0.25;
  auto e1 = estimate(c.e1, N), e2 = estimate(c.e2, N), e3 = estimate(c.e3, N);
  auto msg = estimate(c.message_error, N);
  rep.rates = {{"E1", e1},
               {"E2", e2},
               {"E3", e3},
               {"bob message error", estimate(c.bob_message_error, N)},
               {"charlie message error", estimate(c.charlie_message_error, N)},
               {"message error", msg},
               {"index error", estimate(c.index_error, N)}};
  rep.checks = {
      make_check("E1", "covering", b.e1, e1, covering_ok),
      make_check("E1", "36 eps~", b.e1_eps, e1, covering_ok && b.bands_valid),
      make_check("E2", "chain", b.e2_chain, e2, true),
      make_check("E3", "chain", b.e3_chain, e3, true),
      make_check("E2", "8 eps0 + 4 eps~", b.e23_eps_derived, e2, b.bands_valid),
      make_check("E3", "8 eps0 + 4 eps~", b.e23_eps_derived, e3, b.bands_valid),
      make_check("E2", "8 eps0 + 2 eps~ (claimed)", b.e23_eps_claimed, e2, false),
      make_check("E3", "8 eps0 + 2 eps~ (claimed)", b.e23_eps_claimed, e3, false),
      make_check("message error", "union of intermediate bounds",
                 b.e1 + b.e2_chain + b.e3_chain, msg, covering_ok),
      make_check("message error", "40 eps~ + 16 eps0", b.total_quantum, msg,
                 rep.theorem_hypotheses),
  };
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace marton
