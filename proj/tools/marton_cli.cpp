#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marton/bounds.hpp"
#include "marton/coding.hpp"
#include "marton/covering.hpp"
#include "marton/divergence.hpp"
#include "marton/error.hpp"
#include "marton/json_io.hpp"
#include "marton/region.hpp"
#include "marton/simulate_config.hpp"

namespace fs = std::filesystem;
using namespace marton;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInfeasible = 2, kParse = 3, kInternal = 4 };

fs::path out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MARTON_OUT_DIR")) return env;
  return "marton_out";
}

// "0.25", "1e-3", "2^-10".
double parse_real(const std::string& s) {
  auto caret = s.find('^');
  std::size_t used = 0;
  try {
    if (caret == std::string::npos) {
      double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } else {
      std::string base = s.substr(0, caret), expo = s.substr(caret + 1);
      std::size_t u1 = 0, u2 = 0;
      double b = std::stod(base, &u1), e = std::stod(expo, &u2);
      if (u1 == base.size() && u2 == expo.size()) return std::pow(b, e);
    }
  } catch (const std::exception&) {
  }
  throw ParseError("cannot read '" + s + "' as a number");
}

// "1,2,4,...,128" continues the progression of the two terms before "...".
std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) parts.push_back(tok);
  std::vector<std::size_t> out;
  auto num = [&](const std::string& t) -> std::size_t {
    try {
      std::size_t used = 0;
      long long v = std::stoll(t, &used);
      if (used == t.size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ParseError("--n: cannot read '" + t + "' as a positive integer");
  };
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(num(parts[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 >= parts.size()) throw ParseError("--n: '...' needs two terms before and one after");
    const std::size_t a = out[out.size() - 2], b = out.back(), end = num(parts[i + 1]);
    const bool geometric = b % a == 0 && b / a > 1 && (out.size() < 3 || b * out[out.size() - 3] == a * a);
    if (geometric) {
      for (std::size_t v = b * (b / a); v < end; v *= b / a) out.push_back(v);
    } else {
      if (b <= a) throw ParseError("--n: progression must increase");
      for (std::size_t v = b + (b - a); v < end; v += b - a) out.push_back(v);
    }
  }
  return out;
}

void emit(const Json& j, const fs::path& dir, const std::string& name) {
  write_text(dir / name, j.dump(2) + "\n");
}

int cmd_divergence(const std::string& joint_path, const std::string& cq_path, const std::string& kind,
                   double eps, const std::string& method, std::size_t n) {
  DivergenceResult r;
  if (!cq_path.empty()) {
    Json j = load_json(cq_path);
    if (kind != "i0") throw ParseError("--kind: cq states support only i0");
    if (!j.contains("classical_dim") || !j["classical_dim"].is_number_integer())
      throw ParseError(cq_path + ": missing integer field 'classical_dim'");
    if (!j.contains("state")) throw ParseError(cq_path + ": missing field 'state'");
    ComplexMatrix m = parse_matrix(j["state"], cq_path + ".state");
    DensityOperator rho = [&] {
      try {
        return DensityOperator(m);
      } catch (const InvalidArgument& e) {
        throw ParseError(cq_path + ".state: " + e.what());
      }
    }();
    r = quantum_i0(rho, j["classical_dim"].get<std::size_t>(), eps);
  } else {
    JointPmf joint = parse_joint(load_json(joint_path), joint_path);
    if (kind == "i-infty") {
      r = n == 1 ? classical_i_infty(joint, eps) : classical_i_infty_iid(joint, n, eps);
    } else if (kind == "i0") {
      I0Method m = parse_i0_method(method);
      if (n == 1) {
        r = classical_i0(joint, eps, m);
      } else if (m == I0Method::randomized) {
        r = classical_i0_iid(joint, n, eps);
      } else {
        r = classical_i0_iid_threshold(iid_llr_spectrum(joint, n), eps);
      }
    } else {
      throw ParseError("--kind: expected i0 or i-infty");
    }
  }
  std::cout << to_json(r).dump(2) << "\n";
  return kOk;
}

int cmd_bands(int R1, int R2, double I0B, double I0C, double I_inf, double eps_tilde, bool explain) {
  RateParams p;
  p.R1 = R1;
  p.R2 = R2;
  p.eps_tilde = eps_tilde;
  p.I_inf = I_inf;
  p.I0B = I0B;
  p.I0C = I0C;
  Json out;
  int code = kOk;
  try {
    BandSelection s = select_band_exponents(R1, R2, I0B, I0C, I_inf, eps_tilde);
    p.r1 = s.r1;
    p.r2 = s.r2;
    out = to_json(s);
  } catch (const InfeasibleError& e) {
    out = Json{{"infeasible", e.constraint()}, {"message", e.what()}};
    code = kInfeasible;
  }
  if (explain) {
    if (code == kInfeasible) {
      const double L = log_inv(eps_tilde);
      p.r1 = std::max(1, static_cast<int>(std::ceil(L - 1e-9)));
      p.r2 = p.r1;
      out["explained_at"] = Json{{"r1", p.r1}, {"r2", p.r2}};
    }
    out["band_constraints"] = to_json(band_constraints(p));
    out["rate_constraints"] = to_json(rate_constraints(p));
    for (const auto& c : band_constraints(p))
      std::cerr << (c.ok ? "ok   " : "FAIL ") << c.name << ": " << c.expression << "  lhs=" << c.lhs
                << " rhs=" << c.rhs << " slack=" << c.slack() << "\n";
    for (const auto& c : rate_constraints(p))
      std::cerr << (c.ok ? "ok   " : "FAIL ") << c.name << ": " << c.expression << "  lhs=" << c.lhs
                << " rhs=" << c.rhs << " slack=" << c.slack() << "\n";
  }
  std::cout << out.dump(2) << "\n";
  return code;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& dir_flag, bool serial) {
  Json j = load_json(config_path);
  SimulateConfig c = parse_simulate_config(j, fs::path(config_path).parent_path(), config_path);
  if (seed) c.seed = *seed;
  SimulateResult r = run_simulation(c, !serial);
  const fs::path dir = out_dir(dir_flag);
  emit(r.report, dir, "report.json");
  write_text(dir / "checks.csv", checks_csv(r.experiment));
  const auto& e = r.experiment;
  std::cout << "trials " << e.counts.trials << "  message error " << e.counts.message_error
            << "  index error " << e.counts.index_error << "  E1 " << e.counts.e1 << "\n";
  for (const auto& chk : e.checks)
    std::cout << (chk.applicable ? (chk.violated ? "VIOLATED " : "ok       ") : "info     ")
              << chk.event << " <= " << chk.bound << " (" << chk.value << "): rate "
              << chk.estimate.rate << ", upper95 " << chk.estimate.upper_one_sided << "\n";
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return e.any_violation() ? kViolation : kOk;
}

std::vector<CoveringParams> covering_grid() {
  std::vector<CoveringParams> g;
  for (double r : {64.0, 1024.0})
    for (double q : {std::exp2(-4), std::exp2(-10)})
      for (double alpha : {0.25, 0.5, 1.0}) g.push_back({r, r, q, alpha});
  g.push_back({256, 1024, std::exp2(-8), 0.25});
  g.push_back({1024, 256, std::exp2(-8), 0.5});
  return g;
}

int cmd_covering(double r, double s, const std::string& q, double alpha, std::size_t trials,
                 std::uint64_t seed, bool grid, const std::string& dir_flag) {
  std::vector<CoveringParams> points =
      grid ? covering_grid() : std::vector<CoveringParams>{{r, s, parse_real(q), alpha}};
  std::vector<CoveringResult> results;
  Json arr = Json::array();
  bool violated = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    results.push_back(synthetic_covering(points[i], trials, derive_stream(seed, i)));
    const auto& res = results.back();
    arr.push_back(to_json(res));
    violated |= res.violated || !res.within_3sigma;
    std::cout << "r=" << res.params.r << " s=" << res.params.s << " q=" << res.params.q
              << " alpha=" << res.params.alpha << "  Pr{Z=0}=" << res.estimate.rate
              << "  bound=" << res.bound_raw << (res.within_3sigma ? "  ok" : "  ABOVE") << "\n";
  }
  const fs::path dir = out_dir(dir_flag);
  emit(Json{{"trials", trials}, {"seed", seed}, {"points", arr}}, dir, "covering.json");
  write_text(dir / "covering.csv", covering_csv(results));
  return violated ? kViolation : kOk;
}

int cmd_region(const DivergenceInputs& in, double eps_tilde, double gamma, const std::string& setting,
               const std::string& dir_flag) {
  Setting st = setting == "quantum" ? Setting::quantum : Setting::classical;
  if (setting != "quantum" && setting != "classical") throw ParseError("--setting: expected classical or quantum");
  RegionComparison c = compare_regions(in, eps_tilde, gamma, st);
  Json j = to_json(c);
  std::cout << j.dump(2) << "\n";
  emit(j, out_dir(dir_flag), "region.json");
  return kOk;
}

int cmd_curve(const std::string& base_path, const std::string& uv_path, double eps, double eps_inf,
              const std::string& ns, const std::string& dir_flag) {
  JointPmf base = parse_joint(load_json(base_path), base_path);
  JointPmf uv = uv_path.empty() ? base : parse_joint(load_json(uv_path), uv_path);
  auto rows = iid_convergence_curve(base, uv, eps, eps_inf < 0 ? eps : eps_inf, parse_n_list(ns));
  const std::string csv = curve_csv(rows);
  std::cout << csv;
  const fs::path dir = out_dir(dir_flag);
  write_text(dir / "iid_curve.csv", csv);
  emit(to_json(rows), dir, "iid_curve.json");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-shot Marton coding for classical and cq broadcast channels"};
  app.require_subcommand(1);

  std::string out_flag;

  auto* div = app.add_subcommand("divergence", "smooth I0 / I_infty of a joint pmf or cq state");
  std::string joint, cq, kind = "i0", method = "greedy";
  double eps = 0.0;
  std::size_t n = 1;
  auto* jopt = div->add_option("--joint", joint, "joint pmf JSON");
  auto* copt = div->add_option("--cq", cq, "cq state JSON {classical_dim, state}");
  jopt->excludes(copt);
  div->add_option("--kind", kind, "i0 | i-infty")->check(CLI::IsMember({"i0", "i-infty"}));
  div->add_option("--eps", eps, "smoothing")->required();
  div->add_option("--method", method, "greedy | exhaustive | randomized");
  div->add_option("--n", n, "iid block length")->check(CLI::PositiveNumber);

  auto* bands = app.add_subcommand("bands", "band exponents (r1, r2)");
  int R1 = 0, R2 = 0;
  double I0B = 0, I0C = 0, I_inf = 0, eps_tilde = 0.01;
  bool explain = false;
  bands->add_option("--R1", R1)->required();
  bands->add_option("--R2", R2)->required();
  bands->add_option("--I0B", I0B)->required();
  bands->add_option("--I0C", I0C)->required();
  bands->add_option("--I-inf", I_inf)->required();
  bands->add_option("--eps-tilde", eps_tilde)->required();
  bands->add_flag("--explain", explain, "print every condition with its slack");

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment from a config");
  std::string config;
  std::optional<std::uint64_t> seed;
  bool serial = false;
  sim->add_option("--config", config, "experiment config or previous report")->required();
  sim->add_option("--seed", seed, "overrides the config seed");
  sim->add_option("--out-dir", out_flag, "output directory (default $MARTON_OUT_DIR)");
  sim->add_flag("--serial", serial, "run trials on one thread");

  auto* cov = app.add_subcommand("covering", "synthetic mutual covering simulation");
  double r = 1024, s = 1024, alpha = 0.25;
  std::string q = "2^-10";
  std::size_t trials = 20000;
  std::uint64_t cov_seed = 1;
  bool grid = false;
  cov->add_option("--r", r);
  cov->add_option("--s", s);
  cov->add_option("--q", q, "e.g. 0.001 or 2^-10");
  cov->add_option("--alpha", alpha);
  cov->add_option("--trials", trials);
  cov->add_option("--seed", cov_seed);
  cov->add_flag("--grid", grid, "run the built-in 14-point grid");
  cov->add_option("--out-dir", out_flag);

  auto* reg = app.add_subcommand("region", "Marton and Verdu rate regions");
  DivergenceInputs in;
  double gamma = 0.01;
  std::string setting = "classical";
  reg->add_option("--I0B", in.I0B)->required();
  reg->add_option("--I0C", in.I0C)->required();
  reg->add_option("--I-inf", in.I_inf)->required();
  reg->add_option("--eps0", in.eps0)->required();
  reg->add_option("--eps-infty", in.eps_infty)->required();
  reg->add_option("--eps-tilde", eps_tilde)->required();
  reg->add_option("--gamma", gamma);
  reg->add_option("--setting", setting);
  reg->add_option("--out-dir", out_flag);

  auto* curve = app.add_subcommand("iid-curve", "normalized I0 and I_infty against n");
  std::string base, uv, ns = "1,2,4,...,128";
  double eps_inf = -1;
  curve->add_option("--base", base, "joint pmf of (U, Y)")->required();
  curve->add_option("--uv", uv, "joint pmf of (U, V); defaults to --base");
  curve->add_option("--eps", eps)->required();
  curve->add_option("--eps-infty", eps_inf);
  curve->add_option("--n", ns, "comma list, '...' continues a progression");
  curve->add_option("--out-dir", out_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*div) {
      if (joint.empty() && cq.empty()) throw ParseError("divergence: give --joint or --cq");
      return cmd_divergence(joint, cq, kind, eps, method, n);
    }
    if (*bands) return cmd_bands(R1, R2, I0B, I0C, I_inf, eps_tilde, explain);
    if (*sim) return cmd_simulate(config, seed, out_flag, serial);
    if (*cov) return cmd_covering(r, s, q, alpha, trials, cov_seed, grid, out_flag);
    if (*reg) return cmd_region(in, eps_tilde, gamma, setting, out_flag);
    if (*curve) return cmd_curve(base, uv, eps, eps_inf, ns, out_flag);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible (" << e.constraint() << "): " << e.what() << "\n";
    return kInfeasible;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
