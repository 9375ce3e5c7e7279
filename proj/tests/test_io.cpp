#include <doctest.h>

#include <string>

#include "marton/error.hpp"
#include "marton/json_io.hpp"
#include "marton/simulate_config.hpp"

using namespace marton;

namespace {

std::string parse_message(const Json& j) {
  try {
    parse_joint(j, "joint.json");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

Json small_config() {
  return Json::parse(R"({
    "mode": "free", "setting": "classical",
    "channel": "bsc_pair.json", "design": "independent_bits.json",
    "n": 4, "eps": 0.5, "eps0": 0.05, "eps_infty": 0.25, "eps_tilde": 0.05,
    "rates": {"R1": 1, "R2": 1}, "bands": {"r1": 2, "r2": 2},
    "trials": 60, "seed": 3
  })");
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("joint pmf parsing") {
  auto j = parse_joint(Json::parse(R"({"rows": ["a", "b"], "p": [[0.1, 0.2], [0.3, 0.4]]})"), "x");
  CHECK(j.row_labels()[1] == "b");
  CHECK(j.col_labels()[1] == "1");
  CHECK(j(1, 0) == doctest::Approx(0.3));

  CHECK(parse_message(Json::parse(R"({"p": [[0.5, 0.2], [0.1, "x"]]})")).find("joint.json.p[1][1]") !=
        std::string::npos);
  CHECK(parse_message(Json::parse(R"({"q": []})")).find("missing field 'p'") != std::string::npos);
  CHECK(parse_message(Json::parse(R"({"p": [[0.5, 0.2], [0.1]]})")).find("p[1]") != std::string::npos);
  CHECK(parse_message(Json::parse(R"({"p": [[0.5, 0.2], [0.1, 0.1]]})")).find("joint.json.p") !=
        std::string::npos);
  CHECK(parse_message(Json::parse(R"({"rows": ["a"], "p": [[0.5], [0.5]]})")).find("rows") !=
        std::string::npos);
}

TEST_CASE("matrix parsing") {
  auto m = parse_matrix(Json::parse(R"([[0.5, [0, 0.5]], [[0, -0.5], 0.5]])"), "m");
  CHECK(m(0, 1) == std::complex<double>(0, 0.5));
  CHECK_THROWS_AS(parse_matrix(Json::parse(R"([[1, 0]])"), "m"), ParseError);
  CHECK_THROWS_AS(parse_matrix(Json::parse(R"([[1, [0, 1, 2]], [0, 1]])"), "m"), ParseError);
}

TEST_CASE("channel and design files") {
  auto cfg = std::string(MARTON_CONFIG_DIR);
  auto ch = parse_classical_channel(load_json(cfg + "/bsc_pair.json"), "bsc_pair.json");
  CHECK(ch.x_size() == 4);
  CHECK(ch.transition(2)(1, 0) == doctest::Approx(0.98 * 0.98));
  auto d = parse_design(load_json(cfg + "/independent_bits.json"), "design", ch.x_alphabet());
  CHECK(d.f(1, 0) == 2);
  auto q = parse_cq_channel(load_json(cfg + "/qubit_channel.json"), "q");
  CHECK(q.dim_b() == 2);
  CHECK(q.bob_state(0).matrix()(0, 1) == std::complex<double>(0.1, 0.05));
  auto qd = parse_design(load_json(cfg + "/qubit_design.json"), "qd", q.x_alphabet());
  CHECK(qd.f(1, 0) == 1);
  CHECK_THROWS_AS(load_json(cfg + "/does_not_exist.json"), ParseError);
  CHECK_THROWS_AS(parse_design(load_json(cfg + "/independent_bits.json"), "d", {"0", "1"}), ParseError);
  CHECK_THROWS_AS(parse_classical_channel(Json::parse(R"({"x": ["0"], "y": ["0"], "z": ["0"]})"), "c"),
                  ParseError);
}

TEST_CASE("simulate config") {
  auto c = parse_simulate_config(small_config(), MARTON_CONFIG_DIR, "cfg");
  CHECK(c.mode == ConfigMode::free);
  CHECK(*c.r1 == 2);
  CHECK(c.channel.contains("bob"));
  auto bad = small_config();
  bad.erase("eps0");
  CHECK_THROWS_AS(parse_simulate_config(bad, MARTON_CONFIG_DIR, "cfg"), ParseError);
  bad = small_config();
  bad["mode"] = "theorem";
  CHECK_THROWS_AS(parse_simulate_config(bad, MARTON_CONFIG_DIR, "cfg"), ParseError);
  bad = small_config();
  bad["rates"] = "many";
  CHECK_THROWS_AS(parse_simulate_config(bad, MARTON_CONFIG_DIR, "cfg"), ParseError);
}

TEST_CASE("simulation replay from a report") {
  auto c = parse_simulate_config(small_config(), MARTON_CONFIG_DIR, "cfg");
  auto first = run_simulation(c);
  auto replay_cfg = parse_simulate_config(first.report, "/nonexistent", "report");
  auto second = run_simulation(replay_cfg, false);
  CHECK(second.experiment.counts == first.experiment.counts);
  auto a = first.report, b = second.report;
  a["experiment"].erase("timing");
  b["experiment"].erase("timing");
  CHECK(a.dump() == b.dump());
  CHECK(first.report["experiment"]["counts"]["trials"] == 60);
  CHECK(first.report.contains("digests"));
}

TEST_CASE("theorem mode hypotheses") {
  auto j = small_config();
  j["mode"] = "theorem";
  j.erase("bands");
  j["eps"] = 0.1;
  auto c = parse_simulate_config(j, MARTON_CONFIG_DIR, "cfg");
  CHECK_THROWS_AS(run_simulation(c), InfeasibleError);
}

TEST_CASE("auto rates") {
  auto [R1, R2] = auto_rates(60, 50, 2, 0.01);
  RateParams p{R1, R2, 0, 0, 0.01, 0, 0, 2, 60, 50};
  CHECK(all_hold(rate_constraints(p)));
  CHECK_NOTHROW(select_band_exponents(R1, R2, 60, 50, 2, 0.01));
  auto admissible = [](int a, int b) {
    RateParams q{a, b, 0, 0, 0.01, 0, 0, 2, 60, 50};
    if (!all_hold(rate_constraints(q))) return false;
    try {
      select_band_exponents(a, b, 60, 50, 2, 0.01);
    } catch (const InfeasibleError&) {
      return false;
    }
    return true;
  };
  CHECK_FALSE(admissible(R1 + 1, R2 + 1));
  CHECK((!admissible(R1 + 1, R2) || !admissible(R1, R2 + 1)));
  CHECK_THROWS_AS(auto_rates(10, 10, 0, 0.01), InfeasibleError);
}

TEST_CASE("report serialization") {
  RateParams p{1, 1, 2, 2, 0.01, 0.01, 0.1, 0.5, 30, 30};
  ExperimentReport r;
  r.params = p;
  r.bounds = event_bounds(p);
  r.checks.push_back(make_check("E1", "covering", r.bounds.e1, estimate(3, 100), true));
  Json j = to_json(r);
  CHECK(j["params"]["r1"] == 2);
  CHECK(j["checks"][0]["event"] == "E1");
  CHECK(checks_csv(r).find("E1,covering,") != std::string::npos);
}

}
