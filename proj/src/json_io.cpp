#include "marton/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "marton/error.hpp"

namespace marton {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError(where + ": " + msg);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string sub(const std::string& where, const std::string& key) { return where + "." + key; }
std::string sub(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], sub(where, i)));
  return out;
}

std::vector<std::vector<double>> number_rows(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(numbers(j[i], sub(where, i)));
  return out;
}

std::string label(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  fail(where, "expected a string label");
}

std::vector<std::string> labels(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of labels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(label(j[i], sub(where, i)));
  return out;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

std::vector<std::string> labels_or_default(const Json& j, const char* key, std::size_t n,
                                           const std::string& where) {
  if (!j.contains(key)) return default_labels(n);
  auto out = labels(j[key], sub(where, key));
  if (out.size() != n)
    fail(sub(where, key), "has " + std::to_string(out.size()) + " labels, expected " +
                              std::to_string(n));
  return out;
}

std::size_t positive_size(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) fail(where, "expected a positive integer");
  return static_cast<std::size_t>(j.get<long long>());
}

template <class F>
auto validated(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    fail(where, e.what());
  }
}

Json matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto z = m(r, c);
      if (z.imag() == 0.0)
        row.push_back(z.real());
      else
        row.push_back(Json::array({z.real(), z.imag()}));
    }
    rows.push_back(row);
  }
  return rows;
}

Json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Pmf parse_pmf(const Json& j, const std::string& where) {
  auto p = numbers(field(j, "p", where), sub(where, "p"));
  auto l = labels_or_default(j, "labels", p.size(), where);
  return validated(sub(where, "p"), [&] { return Pmf(l, p); });
}

JointPmf parse_joint(const Json& j, const std::string& where) {
  auto p = number_rows(field(j, "p", where), sub(where, "p"));
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i].size() != p[0].size()) fail(sub(sub(where, "p"), i), "row length differs from row 0");
  auto rows = labels_or_default(j, "rows", p.size(), where);
  auto cols = labels_or_default(j, "cols", p[0].size(), where);
  return validated(sub(where, "p"), [&] { return JointPmf(rows, cols, p); });
}

ComplexMatrix parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty square matrix");
  const std::size_t n = j.size();
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string wr = sub(where, r);
    if (!j[r].is_array() || j[r].size() != n) fail(wr, "expected a row of length " + std::to_string(n));
    for (std::size_t c = 0; c < n; ++c) {
      const Json& e = j[r][c];
      const std::string wc = sub(wr, c);
      if (e.is_array()) {
        if (e.size() != 2) fail(wc, "complex entries are [re, im]");
        m(r, c) = {number(e[0], wc), number(e[1], wc)};
      } else {
        m(r, c) = number(e, wc);
      }
    }
  }
  return m;
}

ClassicalBroadcastChannel parse_classical_channel(const Json& j, const std::string& where) {
  auto x = labels(field(j, "x", where), sub(where, "x"));
  auto y = labels(field(j, "y", where), sub(where, "y"));
  auto z = labels(field(j, "z", where), sub(where, "z"));
  std::vector<std::vector<std::vector<double>>> p(x.size(),
                                                  std::vector<std::vector<double>>(y.size(), std::vector<double>(z.size())));
  auto check_shape = [&](const std::vector<std::vector<double>>& m, std::size_t cols,
                         const std::string& w) {
    if (m.size() != x.size()) fail(w, "expected one row per input symbol");
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i].size() != cols) fail(sub(w, i), "expected " + std::to_string(cols) + " entries");
  };
  if (j.contains("p")) {
    const Json& t = j["p"];
    const std::string w = sub(where, "p");
    if (!t.is_array() || t.size() != x.size()) fail(w, "expected one matrix per input symbol");
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto m = number_rows(t[i], sub(w, i));
      if (m.size() != y.size()) fail(sub(w, i), "expected one row per y symbol");
      for (std::size_t a = 0; a < y.size(); ++a) {
        if (m[a].size() != z.size()) fail(sub(sub(w, i), a), "expected one entry per z symbol");
        p[i][a] = m[a];
      }
    }
  } else if (j.contains("bob") && j.contains("charlie")) {
    auto b = number_rows(j["bob"], sub(where, "bob"));
    auto c = number_rows(j["charlie"], sub(where, "charlie"));
    check_shape(b, y.size(), sub(where, "bob"));
    check_shape(c, z.size(), sub(where, "charlie"));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t a = 0; a < y.size(); ++a)
        for (std::size_t d = 0; d < z.size(); ++d) p[i][a][d] = b[i][a] * c[i][d];
  } else {
    fail(where, "needs either 'p' or both 'bob' and 'charlie'");
  }
  return validated(where, [&] { return ClassicalBroadcastChannel::from_tensor(x, y, z, p); });
}

CqBroadcastChannel parse_cq_channel(const Json& j, const std::string& where) {
  auto x = labels(field(j, "x", where), sub(where, "x"));
  std::vector<DensityOperator> states;
  std::size_t db = 0, dc = 0;
  auto density = [&](const Json& m, const std::string& w) {
    ComplexMatrix mat = parse_matrix(m, w);
    return validated(w, [&] { return DensityOperator(mat); });
  };
  if (j.contains("states")) {
    db = positive_size(field(j, "dim_b", where), sub(where, "dim_b"));
    dc = positive_size(field(j, "dim_c", where), sub(where, "dim_c"));
    const Json& s = j["states"];
    if (!s.is_array() || s.size() != x.size()) fail(sub(where, "states"), "expected one state per input symbol");
    for (std::size_t i = 0; i < x.size(); ++i) states.push_back(density(s[i], sub(sub(where, "states"), i)));
  } else if (j.contains("bob_states") && j.contains("charlie_states")) {
    const Json& b = j["bob_states"];
    const Json& c = j["charlie_states"];
    if (!b.is_array() || b.size() != x.size()) fail(sub(where, "bob_states"), "expected one state per input symbol");
    if (!c.is_array() || c.size() != x.size()) fail(sub(where, "charlie_states"), "expected one state per input symbol");
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto rb = density(b[i], sub(sub(where, "bob_states"), i));
      auto rc = density(c[i], sub(sub(where, "charlie_states"), i));
      if (i == 0) {
        db = rb.dim();
        dc = rc.dim();
      }
      if (rb.dim() != db || rc.dim() != dc) fail(sub(where, "bob_states"), "state dimensions differ across inputs");
      states.push_back(tensor(rb, rc));
    }
  } else {
    fail(where, "needs either 'states' or both 'bob_states' and 'charlie_states'");
  }
  return validated(where, [&] { return CqBroadcastChannel(x, db, dc, std::move(states)); });
}

InputDesign parse_design(const Json& j, const std::string& where,
                         const std::vector<std::string>& x_alphabet) {
  auto p = number_rows(field(j, "p", where), sub(where, "p"));
  auto u = labels_or_default(j, "u", p.size(), where);
  auto v = labels_or_default(j, "v", p[0].size(), where);
  JointPmf uv = validated(sub(where, "p"), [&] { return JointPmf(u, v, p); });
  const Json& f = field(j, "f", where);
  const std::string wf = sub(where, "f");
  std::map<std::string, std::string> map;
  if (f.is_object()) {
    for (auto it = f.begin(); it != f.end(); ++it) map[it.key()] = label(it.value(), sub(wf, it.key()));
  } else if (f.is_array()) {
    if (f.size() != u.size()) fail(wf, "expected one row per u symbol");
    for (std::size_t a = 0; a < u.size(); ++a) {
      if (!f[a].is_array() || f[a].size() != v.size()) fail(sub(wf, a), "expected one entry per v symbol");
      for (std::size_t b = 0; b < v.size(); ++b)
        if (!f[a][b].is_null()) map[u[a] + "," + v[b]] = label(f[a][b], sub(sub(wf, a), b));
    }
  } else {
    fail(wf, "expected an object or an array");
  }
  return validated(wf, [&] { return InputDesign::from_labels(uv, map, x_alphabet); });
}

// ---------------------------------------------------------------------------

Json to_json(const DivergenceResult& r) {
  Json j;
  j["value"] = number_or_null(r.value);
  j["epsilon"] = r.epsilon;
  j["method"] = r.method;
  j["constraint_mass"] = r.constraint_mass;
  j["objective"] = r.objective;
  if (r.upper_bound) j["upper_bound"] = number_or_null(*r.upper_bound);
  Json w;
  if (const auto* s = std::get_if<SetWitness>(&r.witness)) {
    w["kind"] = "set";
    w["cells"] = s->cells;
    if (s->boundary_cell) {
      w["boundary_cell"] = *s->boundary_cell;
      w["boundary_weight"] = s->boundary_weight;
    }
  } else if (const auto* o = std::get_if<OperatorWitness>(&r.witness)) {
    w["kind"] = "operator";
    w["lambda"] = o->lambda;
    w["boundary_weight"] = o->boundary_weight;
    w["boundary_rank"] = o->boundary_rank;
    w["test"] = matrix_json(o->test.matrix());
  } else {
    const auto& t = std::get<ThresholdWitness>(r.witness);
    w["kind"] = "threshold";
    w["threshold"] = number_or_null(t.threshold);
    w["boundary_weight"] = t.boundary_weight;
  }
  j["witness"] = w;
  return j;
}

Json to_json(const RateParams& p) {
  return Json{{"R1", p.R1},       {"R2", p.R2},           {"r1", p.r1},
              {"r2", p.r2},       {"eps_tilde", p.eps_tilde}, {"eps0", p.eps0},
              {"eps_infty", p.eps_infty}, {"I_inf", p.I_inf}, {"I0B", p.I0B},
              {"I0C", p.I0C}};
}

Json to_json(const ConstraintCheck& c) {
  return Json{{"name", c.name}, {"expression", c.expression}, {"lhs", c.lhs}, {"rhs", c.rhs},
              {"slack", c.slack()}, {"equality", c.equality}, {"ok", c.ok}};
}

Json to_json(const std::vector<ConstraintCheck>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(to_json(c));
  return a;
}

Json to_json(const BandSelection& b) {
  return Json{{"r1", b.r1},         {"r2", b.r2},     {"floor", b.floor},
              {"target", b.target}, {"cap1", b.cap1}, {"cap2", b.cap2}};
}

Json to_json(const Estimate& e) {
  return Json{{"successes", e.successes},
              {"trials", e.trials},
              {"rate", e.rate},
              {"sigma", e.sigma},
              {"ci95", Json::array({e.lower, e.upper})},
              {"upper_one_sided", e.upper_one_sided},
              {"lower_one_sided", e.lower_one_sided}};
}

Json to_json(const EventBounds& b) {
  return Json{{"e1", b.e1},
              {"e1_alt", b.e1_alt},
              {"e1_eps", b.e1_eps},
              {"e2_chain", b.e2_chain},
              {"e3_chain", b.e3_chain},
              {"e23_eps_claimed", b.e23_eps_claimed},
              {"e23_eps_derived", b.e23_eps_derived},
              {"e2_classical", b.e2_classical},
              {"e3b_chain", b.e3b_chain},
              {"e3c_chain", b.e3c_chain},
              {"e3_eps_claimed", b.e3_eps_claimed},
              {"e3_eps_derived", b.e3_eps_derived},
              {"total_quantum", b.total_quantum},
              {"total_classical", b.total_classical},
              {"total_quantum_derived", b.total_quantum_derived},
              {"total_classical_derived", b.total_classical_derived},
              {"bands_valid", b.bands_valid}};
}

Json to_json(const EventCounts& c) {
  return Json{{"trials", c.trials},
              {"e1", c.e1},
              {"e2b", c.e2b},
              {"e2c", c.e2c},
              {"e3b", c.e3b},
              {"e3c", c.e3c},
              {"e2", c.e2},
              {"e3", c.e3},
              {"bob_message_error", c.bob_message_error},
              {"charlie_message_error", c.charlie_message_error},
              {"message_error", c.message_error},
              {"index_error", c.index_error},
              {"scanned", c.scanned},
              {"exact_e2_sum", c.exact_e2_sum},
              {"exact_e3_sum", c.exact_e3_sum},
              {"hn_b_sum", c.hn_b_sum},
              {"hn_c_sum", c.hn_c_sum}};
}

Json to_json(const BoundCheck& c) {
  return Json{{"event", c.event},
              {"bound", c.bound},
              {"value", c.value},
              {"applicable", c.applicable},
              {"within_3sigma", c.within_3sigma},
              {"violated", c.violated},
              {"estimate", to_json(c.estimate)}};
}

Json to_json(const ExperimentReport& r) {
  Json j;
  j["setting"] = r.setting == Setting::quantum ? "quantum" : "classical";
  j["n"] = r.n;
  j["params"] = to_json(r.params);
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["resample_codebook"] = r.resample_codebook;
  j["codebook_digest"] = r.codebook_digest;
  j["theorem_hypotheses"] = r.theorem_hypotheses;
  j["band_constraints"] = to_json(r.band_checks);
  j["rate_constraints"] = to_json(r.rate_checks);
  j["counts"] = to_json(r.counts);
  Json rates = Json::object();
  for (const auto& [name, e] : r.rates) rates[name] = to_json(e);
  j["rates"] = rates;
  j["bounds"] = to_json(r.bounds);
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  j["any_violation"] = r.any_violation();
  if (r.setting == Setting::quantum) {
    const double ok = static_cast<double>(r.counts.trials - r.counts.e1);
    Json q;
    q["mean_exact_e2"] = ok > 0 ? r.counts.exact_e2_sum / ok : 0.0;
    q["mean_exact_e3"] = ok > 0 ? r.counts.exact_e3_sum / ok : 0.0;
    q["mean_hn_rhs_b"] = ok > 0 ? r.counts.hn_b_sum / ok : 0.0;
    q["mean_hn_rhs_c"] = ok > 0 ? r.counts.hn_c_sum / ok : 0.0;
    j["conditional_on_e1c"] = q;
  }
  j["timing"] = Json{{"wall_seconds", r.wall_seconds}};
  return j;
}

Json to_json(const CoveringResult& r) {
  return Json{{"r", r.params.r},
              {"s", r.params.s},
              {"q", r.params.q},
              {"alpha", r.params.alpha},
              {"law", Json{{"a", r.law.a}, {"c", r.law.c}}},
              {"bound_raw", r.bound_raw},
              {"bound", r.bound},
              {"estimate", to_json(r.estimate)},
              {"within_3sigma", r.within_3sigma},
              {"violated", r.violated}};
}

Json to_json(const BandCoveringResult& r) {
  return Json{{"r1", r.r1},
              {"r2", r.r2},
              {"bound_raw", r.bound_raw},
              {"bound", r.bound},
              {"estimate", to_json(r.estimate)},
              {"within_3sigma", r.within_3sigma},
              {"violated", r.violated}};
}

Json to_json(const RateRegion& r) {
  Json cs = Json::array();
  for (const auto& c : r.constraints)
    cs.push_back(Json{{"name", c.name}, {"a1", c.a1}, {"a2", c.a2}, {"rhs", c.rhs}});
  Json vs = Json::array();
  for (const auto& [a, b] : r.vertices) vs.push_back(Json::array({a, b}));
  return Json{{"name", r.name},
              {"empty", r.empty},
              {"constraints", cs},
              {"polygon", vs},
              {"error_budget", r.error_budget}};
}

Json to_json(const RegionComparison& c) {
  return Json{{"marton", to_json(c.marton)},
              {"verdu", to_json(c.verdu)},
              {"marton_rates_only", to_json(c.marton_rates)},
              {"verdu_rates_only", to_json(c.verdu_rates)},
              {"rates_contained", c.rates_contained},
              {"penalized_contained", c.penalized_contained}};
}

Json to_json(const std::vector<CurveRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows)
    a.push_back(Json{{"n", r.n},
                     {"i0", r.i0},
                     {"i0_per_n", r.i0_per_n},
                     {"i_inf", r.i_inf},
                     {"i_inf_per_n", r.i_inf_per_n},
                     {"target_i0", r.target_i0},
                     {"target_inf", r.target_inf},
                     {"gap_i0", r.gap_i0},
                     {"gap_inf", r.gap_inf},
                     {"atoms", r.atoms}});
  return a;
}

std::string checks_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << "event,bound,value,applicable,successes,trials,rate,lower,upper,upper_one_sided,"
         "violated\n";
  for (const auto& c : r.checks) {
    const auto& e = c.estimate;
    out << c.event << ',' << c.bound << ',' << c.value << ',' << c.applicable << ','
        << e.successes << ',' << e.trials << ',' << e.rate << ',' << e.lower << ',' << e.upper
        << ',' << e.upper_one_sided << ',' << c.violated << '\n';
  }
  return out.str();
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream out;
  out.precision(12);
  out << "n,i0,i0_per_n,target_i0,gap_i0,i_inf,i_inf_per_n,target_inf,gap_inf,atoms\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.i0 << ',' << r.i0_per_n << ',' << r.target_i0 << ',' << r.gap_i0
        << ',' << r.i_inf << ',' << r.i_inf_per_n << ',' << r.target_inf << ',' << r.gap_inf
        << ',' << r.atoms << '\n';
  return out.str();
}

std::string covering_csv(const std::vector<CoveringResult>& rs) {
  std::ostringstream out;
  out.precision(12);
  out << "r,s,q,alpha,bound_raw,successes,trials,rate,upper_one_sided,within_3sigma\n";
  for (const auto& r : rs)
    out << r.params.r << ',' << r.params.s << ',' << r.params.q << ',' << r.params.alpha << ','
        << r.bound_raw << ',' << r.estimate.successes << ',' << r.estimate.trials << ','
        << r.estimate.rate << ',' << r.estimate.upper_one_sided << ',' << r.within_3sigma
        << '\n';
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace marton
