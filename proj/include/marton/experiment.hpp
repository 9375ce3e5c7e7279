#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "marton/bounds.hpp"
#include "marton/channel.hpp"
#include "marton/coding.hpp"
#include "marton/divergence.hpp"
#include "marton/stats.hpp"

namespace marton {

// A classical broadcast channel used n times with an iid design, together
// with the divergences and decoding sets the code is built from. For n = 1
// the decoding sets are the optimizing sets of the smooth min divergence;
// for n > 1 they are upper llr level sets of the n-fold joints.
struct ClassicalInstance {
  ClassicalBroadcastChannel channel;
  InputDesign design;
  std::size_t n = 1;
  double eps0 = 0.0;
  double eps_infty = 0.0;
  JointPmf p_uy;
  JointPmf p_vz;
  DivergenceResult i_inf;
  DivergenceResult i0b;
  DivergenceResult i0c;
  ScoreSet a1;
  ScoreSet a2;
  std::shared_ptr<const ScoreSetEvaluator> evaluator;
};

ClassicalInstance prepare_classical(ClassicalBroadcastChannel channel, InputDesign design,
                                    std::size_t n, double eps0, double eps_infty,
                                    I0Method method = I0Method::greedy);

struct QuantumInstance {
  CqBroadcastChannel channel;
  InputDesign design;
  double eps0 = 0.0;
  double eps_infty = 0.0;
  DensityOperator rho_ub;
  DensityOperator rho_vc;
  DivergenceResult i_inf;
  DivergenceResult i0b;
  DivergenceResult i0c;
  std::vector<HermitianOperator> lambda_b;
  std::vector<HermitianOperator> lambda_c;
  std::shared_ptr<const TableEvaluator> evaluator;
};

QuantumInstance prepare_quantum(CqBroadcastChannel channel, InputDesign design, double eps0,
                                double eps_infty);

// RateParams with the instance's divergences filled in.
RateParams rate_params(const ClassicalInstance& inst, int R1, int R2, int r1, int r2,
                       double eps_tilde);
RateParams rate_params(const QuantumInstance& inst, int R1, int R2, int r1, int r2,
                       double eps_tilde);

struct ExperimentOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  bool resample_codebook = true;
  bool parallel = true;
};

struct EventCounts {
  std::uint64_t trials = 0;
  std::uint64_t e1 = 0;
  // classical: decoding-set misses and collisions per receiver
  std::uint64_t e2b = 0;
  std::uint64_t e2c = 0;
  std::uint64_t e3b = 0;
  std::uint64_t e3c = 0;
  // quantum: index errors at Bob and Charlie
  std::uint64_t e2 = 0;
  std::uint64_t e3 = 0;
  std::uint64_t bob_message_error = 0;
  std::uint64_t charlie_message_error = 0;
  std::uint64_t message_error = 0;
  std::uint64_t index_error = 0;
  std::uint64_t scanned = 0;
  // quantum: sums over trials of Tr[(I - T_k*) rho] on E1^c, and of the
  // per-codebook Hayashi-Nagaoka right-hand side.
  double exact_e2_sum = 0.0;
  double exact_e3_sum = 0.0;
  double hn_b_sum = 0.0;
  double hn_c_sum = 0.0;

  bool operator==(const EventCounts&) const = default;
};

struct BoundCheck {
  std::string event;
  std::string bound;
  double value = 0.0;
  Estimate estimate;
  bool applicable = true;  // the bound's hypotheses hold for these params
  bool within_3sigma = true;
  bool violated = false;   // one-sided 95% lower limit above the bound
};

struct ExperimentReport {
  Setting setting = Setting::classical;
  std::size_t n = 1;
  RateParams params;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool resample_codebook = true;
  EventCounts counts;
  EventBounds bounds;
  std::vector<std::pair<std::string, Estimate>> rates;
  std::vector<BoundCheck> checks;
  std::vector<ConstraintCheck> band_checks;
  std::vector<ConstraintCheck> rate_checks;
  bool theorem_hypotheses = false;
  std::uint64_t codebook_digest = 0;
  double wall_seconds = 0.0;

  bool any_violation() const;
  const BoundCheck* find_check(const std::string& event, const std::string& bound) const;
};

ExperimentReport run_experiment(const ClassicalInstance& inst, const RateParams& params,
                                const ExperimentOptions& options);
ExperimentReport run_experiment(const QuantumInstance& inst, const RateParams& params,
                                const ExperimentOptions& options);

// Seeds: per-trial stream and the codebook seed of a trial.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);
std::uint64_t codebook_seed(std::uint64_t master, std::size_t trial, bool resample);

BoundCheck make_check(std::string event, std::string bound, double value, const Estimate& est,
                      bool applicable);

}  // namespace marton
