#include "marton/simulate_config.hpp"

#include <cmath>
#include <limits>

#include "marton/error.hpp"

namespace marton {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError(where + ": " + msg);
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double probability(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  const std::string w = where + "." + key;
  if (!v.is_number()) fail(w, "expected a number");
  double x = v.get<double>();
  if (!(x >= 0.0 && x < 1.0)) fail(w, "expected a probability in [0, 1)");
  return x;
}

int nonneg_int(const Json& v, const std::string& w) {
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 62)
    fail(w, "expected an integer in [0, 62]");
  return static_cast<int>(v.get<long long>());
}

Json resolve(const Json& v, const std::filesystem::path& base_dir, const std::string& w) {
  if (v.is_object()) return v;
  if (v.is_string()) {
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return load_json(p);
  }
  fail(w, "expected a file path or an inline object");
}

}  // namespace

SimulateConfig parse_simulate_config(const Json& input, const std::filesystem::path& base_dir,
                                     const std::string& where) {
  if (!input.is_object()) fail(where, "expected an object");
  const Json& j = input.contains("config") && input["config"].is_object() ? input["config"] : input;
  SimulateConfig c;
  const Json& mode = need(j, "mode", where);
  if (mode == "theorem")
    c.mode = ConfigMode::theorem;
  else if (mode == "free")
    c.mode = ConfigMode::free;
  else
    fail(where + ".mode", "expected \"theorem\" or \"free\"");
  const Json& setting = need(j, "setting", where);
  if (setting == "classical")
    c.setting = Setting::classical;
  else if (setting == "quantum")
    c.setting = Setting::quantum;
  else
    fail(where + ".setting", "expected \"classical\" or \"quantum\"");
  c.channel = resolve(need(j, "channel", where), base_dir, where + ".channel");
  c.design = resolve(need(j, "design", where), base_dir, where + ".design");
  if (j.contains("n")) {
    const Json& n = j["n"];
    if (!n.is_number_integer() || n.get<long long>() < 1) fail(where + ".n", "expected a positive integer");
    c.n = static_cast<std::size_t>(n.get<long long>());
  }
  c.eps = probability(j, "eps", where);
  c.eps0 = probability(j, "eps0", where);
  c.eps_infty = probability(j, "eps_infty", where);
  c.eps_tilde = probability(j, "eps_tilde", where);
  if (c.eps_tilde <= 0.0) fail(where + ".eps_tilde", "must be positive");
  const Json& rates = need(j, "rates", where);
  if (rates == "auto") {
    c.auto_rates = true;
  } else if (rates.is_object()) {
    c.R1 = nonneg_int(need(rates, "R1", where + ".rates"), where + ".rates.R1");
    c.R2 = nonneg_int(need(rates, "R2", where + ".rates"), where + ".rates.R2");
  } else {
    fail(where + ".rates", "expected {\"R1\", \"R2\"} or \"auto\"");
  }
  if (j.contains("bands") && !j["bands"].is_null()) {
    if (c.mode == ConfigMode::theorem) fail(where + ".bands", "explicit bands need mode \"free\"");
    const Json& b = j["bands"];
    c.r1 = nonneg_int(need(b, "r1", where + ".bands"), where + ".bands.r1");
    c.r2 = nonneg_int(need(b, "r2", where + ".bands"), where + ".bands.r2");
  }
  const Json& trials = need(j, "trials", where);
  if (!trials.is_number_integer() || trials.get<long long>() < 1)
    fail(where + ".trials", "expected a positive integer");
  c.trials = static_cast<std::size_t>(trials.get<long long>());
  const Json& seed = need(j, "seed", where);
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    fail(where + ".seed", "expected a nonnegative integer");
  c.seed = seed.get<std::uint64_t>();
  if (j.contains("resample_codebook")) {
    if (!j["resample_codebook"].is_boolean()) fail(where + ".resample_codebook", "expected a boolean");
    c.resample_codebook = j["resample_codebook"].get<bool>();
  }
  if (j.contains("i0_method")) {
    try {
      c.i0_method = parse_i0_method(j["i0_method"].get<std::string>());
    } catch (const std::exception& e) {
      fail(where + ".i0_method", e.what());
    }
  }
  return c;
}

Json to_json(const SimulateConfig& c) {
  Json j;
  j["mode"] = c.mode == ConfigMode::theorem ? "theorem" : "free";
  j["setting"] = c.setting == Setting::quantum ? "quantum" : "classical";
  j["channel"] = c.channel;
  j["design"] = c.design;
  j["n"] = c.n;
  j["eps"] = c.eps;
  j["eps0"] = c.eps0;
  j["eps_infty"] = c.eps_infty;
  j["eps_tilde"] = c.eps_tilde;
  if (c.auto_rates)
    j["rates"] = "auto";
  else
    j["rates"] = Json{{"R1", c.R1}, {"R2", c.R2}};
  if (c.r1 && c.r2) j["bands"] = Json{{"r1", *c.r1}, {"r2", *c.r2}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["resample_codebook"] = c.resample_codebook;
  j["i0_method"] = to_string(c.i0_method);
  return j;
}

std::uint64_t json_digest(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : j.dump()) h = (h ^ ch) * 0x100000001b3ull;
  return h;
}

std::pair<int, int> auto_rates(double I0B, double I0C, double I_inf, double eps_tilde) {
  auto ok = [&](int R1, int R2) {
    RateParams p;
    p.R1 = R1;
    p.R2 = R2;
    p.eps_tilde = eps_tilde;
    p.I_inf = I_inf;
    p.I0B = I0B;
    p.I0C = I0C;
    if (!all_hold(rate_constraints(p))) return false;
    try {
      select_band_exponents(R1, R2, I0B, I0C, I_inf, eps_tilde);
    } catch (const InfeasibleError&) {
      return false;
    }
    return true;
  };
  if (!ok(0, 0)) {
    select_band_exponents(0, 0, I0B, I0C, I_inf, eps_tilde);
    throw InfeasibleError("rate R1", "no nonnegative rate pair meets the rate conditions");
  }
  int R1 = 0, R2 = 0;
  for (bool moved = true; moved;) {
    moved = false;
    if (R1 < 62 && ok(R1 + 1, R2)) {
      ++R1;
      moved = true;
    }
    if (R2 < 62 && ok(R1, R2 + 1)) {
      ++R2;
      moved = true;
    }
  }
  return {R1, R2};
}

namespace {

struct Resolved {
  RateParams params;
  std::optional<BandSelection> selection;
};

template <class Inst>
Resolved resolve_params(const SimulateConfig& c, const Inst& inst) {
  const double I_inf = inst.i_inf.value, I0B = inst.i0b.value, I0C = inst.i0c.value;
  if (c.mode == ConfigMode::theorem) {
    const double budget = theorem_bound(c.eps_tilde, c.eps0, c.setting);
    if (budget > c.eps + 1e-12)
      throw InfeasibleError("error budget", "error budget: " + std::to_string(budget) +
                                                " exceeds eps = " + std::to_string(c.eps));
    if (c.eps_infty > 0.25) throw InfeasibleError("eps_infty", "eps_infty must be at most 1/4");
  }
  int R1 = c.R1, R2 = c.R2;
  if (c.auto_rates) std::tie(R1, R2) = auto_rates(I0B, I0C, I_inf, c.eps_tilde);
  Resolved out;
  if (c.r1 && c.r2) {
    out.params = rate_params(inst, R1, R2, *c.r1, *c.r2, c.eps_tilde);
  } else {
    BandSelection s = select_band_exponents(R1, R2, I0B, I0C, I_inf, c.eps_tilde);
    out.selection = s;
    out.params = rate_params(inst, R1, R2, s.r1, s.r2, c.eps_tilde);
  }
  if (c.mode == ConfigMode::theorem) {
    for (const auto& check : rate_constraints(out.params))
      if (!check.ok)
        throw InfeasibleError(check.name, check.name + ": " + check.expression + " fails (" +
                                              std::to_string(check.lhs) + " > " +
                                              std::to_string(check.rhs) + ")");
  }
  return out;
}

template <class Inst>
Json divergences_json(const Inst& inst) {
  return Json{{"I_inf", to_json(inst.i_inf)}, {"I0B", to_json(inst.i0b)}, {"I0C", to_json(inst.i0c)}};
}

}  // namespace

SimulateResult run_simulation(const SimulateConfig& c, bool parallel) {
  ExperimentOptions opt{c.trials, c.seed, c.resample_codebook, parallel};
  SimulateResult res;
  Json divergences;
  std::optional<BandSelection> selection;
  if (c.setting == Setting::classical) {
    auto channel = parse_classical_channel(c.channel, "channel");
    auto design = parse_design(c.design, "design", channel.x_alphabet());
    ClassicalInstance inst =
        prepare_classical(std::move(channel), std::move(design), c.n, c.eps0, c.eps_infty, c.i0_method);
    Resolved r = resolve_params(c, inst);
    res.params = r.params;
    selection = r.selection;
    divergences = divergences_json(inst);
    res.experiment = run_experiment(inst, r.params, opt);
  } else {
    auto channel = parse_cq_channel(c.channel, "channel");
    auto design = parse_design(c.design, "design", channel.x_alphabet());
    if (c.n > 1) {
      channel = nfold(channel, c.n);
      design = nfold(design, c.n);
    }
    QuantumInstance inst = prepare_quantum(std::move(channel), std::move(design), c.eps0, c.eps_infty);
    Resolved r = resolve_params(c, inst);
    res.params = r.params;
    selection = r.selection;
    divergences = divergences_json(inst);
    // Operator witnesses are large and recomputable; keep the scalars.
    for (const char* k : {"I0B", "I0C"}) divergences[k]["witness"].erase("test");
    res.experiment = run_experiment(inst, r.params, opt);
  }
  Json j;
  j["config"] = to_json(c);
  j["digests"] = Json{{"channel", json_digest(c.channel)}, {"design", json_digest(c.design)}};
  j["divergences"] = divergences;
  if (selection) j["band_selection"] = to_json(*selection);
  j["experiment"] = to_json(res.experiment);
  res.report = std::move(j);
  return res;
}

}  // namespace marton
