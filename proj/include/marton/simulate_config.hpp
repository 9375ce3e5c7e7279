#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "marton/json_io.hpp"

namespace marton {

enum class ConfigMode { theorem, free };

struct SimulateConfig {
  ConfigMode mode = ConfigMode::theorem;
  Setting setting = Setting::classical;
  Json channel;  // inline, after resolving file references
  Json design;
  std::size_t n = 1;
  double eps = 0.0;
  double eps0 = 0.0;
  double eps_infty = 0.0;
  double eps_tilde = 0.0;
  bool auto_rates = false;
  int R1 = 0;
  int R2 = 0;
  std::optional<int> r1;  // free mode only
  std::optional<int> r2;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool resample_codebook = true;
  I0Method i0_method = I0Method::greedy;
};

// Accepts a config object or a previous report (its "config" member).
// Relative channel/design paths resolve against base_dir.
SimulateConfig parse_simulate_config(const Json& j, const std::filesystem::path& base_dir,
                                     const std::string& where);
Json to_json(const SimulateConfig& c);

struct SimulateResult {
  Json report;
  ExperimentReport experiment;
  RateParams params;
};

// Throws InfeasibleError when the theorem hypotheses or the band selection
// fail, ParseError for malformed channel or design.
SimulateResult run_simulation(const SimulateConfig& config, bool parallel = true);

// Largest (R1, R2) found by alternating unit increments while the band
// selection succeeds and the rate conditions hold.
std::pair<int, int> auto_rates(double I0B, double I0C, double I_inf, double eps_tilde);

std::uint64_t json_digest(const Json& j);

}  // namespace marton
