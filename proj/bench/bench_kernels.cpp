#include <benchmark/benchmark.h>

#include "marton/covering.hpp"
#include "marton/experiment.hpp"
#include "marton/json_io.hpp"

using namespace marton;

namespace {

ClassicalInstance& bsc_instance() {
  static ClassicalInstance inst = [] {
    const std::string dir = MARTON_CONFIG_DIR;
    auto ch = parse_classical_channel(load_json(dir + "/bsc_pair.json"), "channel");
    auto d = parse_design(load_json(dir + "/independent_bits.json"), "design", ch.x_alphabet());
    return prepare_classical(ch, d, 16, 0.05, 0.0);
  }();
  return inst;
}

void BM_SyntheticCovering(benchmark::State& state) {
  CoveringParams p{256, 256, 1.0 / 256, 0.25};
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    auto r = synthetic_covering(p, 2000, 5, parallel);
    benchmark::DoNotOptimize(r.estimate.rate);
  }
}
BENCHMARK(BM_SyntheticCovering)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_ClassicalExperiment(benchmark::State& state) {
  auto& inst = bsc_instance();
  auto params = rate_params(inst, 1, 1, 3, 3, 0.05);
  ExperimentOptions opt{200, 9, true, state.range(0) != 0};
  for (auto _ : state) {
    auto r = run_experiment(inst, params, opt);
    benchmark::DoNotOptimize(r.counts.message_error);
  }
}
BENCHMARK(BM_ClassicalExperiment)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_IidSpectrum(benchmark::State& state) {
  auto base = JointPmf::from_matrix({{0.4, 0.1}, {0.1, 0.4}});
  for (auto _ : state) {
    auto s = iid_llr_spectrum(base, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(s.atoms.size());
  }
}
BENCHMARK(BM_IidSpectrum)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
