#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "vertframe/app.hpp"
#include "vertframe/multiphase.hpp"

using namespace vertframe;
using nlohmann::json;

namespace {

ScenarioConfig parse(const std::string& text) { return parse_config(json::parse(text)); }

const CheckResult& result_named(const VerifyReport& report, const std::string& name) {
  for (const CheckResult& c : report.checks)
    if (c.name == name) return c;
  throw std::logic_error("no check named " + name);
}

}  // namespace

TEST_CASE("minimal config fills in defaults") {
  ScenarioConfig cfg = parse(R"({"version": 1})");
  CHECK(cfg.n == 2);
  CHECK(cfg.k == 2);
  CHECK(cfg.eta == Mat<Rational>::identity(2));
  CHECK(cfg.iota == Mat<Rational>::identity(2));
  CHECK(cfg.t_max == 10.0);
  CHECK(cfg.dt == 0.001);
  CHECK(cfg.checks.empty());
  CHECK(!cfg.theta_flip);
  CHECK(!cfg.seed);
  CHECK(cfg.start == FramePoint(2, 2));
}

TEST_CASE("full config lands in every field") {
  ScenarioConfig cfg = parse(R"({
    "version": 1, "n": 1, "k": 2,
    "eta": [["2"]],
    "iota": [["1", "0"], ["0", "3"]],
    "gamma": [["x1"], ["0"]],
    "generators": [{"name": "mix", "x": ["1"], "y": ["y2", "-y1"]}],
    "initial": {"x1": "1/2", "pi_1_1": "2"},
    "integrator": {"t_max": 2.5, "dt": 0.05},
    "checks": ["pairing", "killing"],
    "theta": {"flip_sign": true},
    "seed": 99,
    "reparam": {"profile": "x1", "assoc_b": [["1", "0"]], "assoc_lambda": "-2/3"}
  })");
  CHECK(cfg.n == 1);
  CHECK(cfg.k == 2);
  CHECK(cfg.eta.at(0, 0) == Rational(2));
  CHECK(cfg.iota.at(1, 1) == Rational(3));
  CHECK(cfg.gamma.at(0, 0).str() == "x1");
  REQUIRE(cfg.generators.size() == 1);
  CHECK(cfg.generators[0].name == "mix");
  CHECK(cfg.generators[0].field.y_comp(1).str() == "y2");
  CHECK(cfg.start.x[0] == Rational(1, 2));
  CHECK(cfg.start.pi_nn.at(0, 0) == Rational(2));
  CHECK(cfg.start.y[0] == 0);  // unbound coordinates keep identity-frame values
  CHECK(cfg.t_max == 2.5);
  CHECK(cfg.dt == 0.05);
  CHECK(cfg.checks == std::vector<std::string>{"pairing", "killing"});
  CHECK(cfg.theta_flip);
  CHECK(cfg.seed == std::uint64_t(99));
  CHECK(cfg.reparam_profile.str() == "x1");
  CHECK(cfg.assoc_b.at(0, 1) == 0);
  CHECK(cfg.assoc_lambda == Rational(-2, 3));
}

TEST_CASE("malformed configs are rejected with pointed messages") {
  CHECK_THROWS_AS(parse(R"({})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse(R"([1])"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "surprise": true})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "n": 0})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "n": 3, "k": 2})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "n": "2"})"), ConfigError);

  // rationals must be strings, matrices must have the right shape
  CHECK_THROWS_WITH(parse(R"({"version": 1, "eta": [[1, 0], [0, 1]]})"),
                    doctest::Contains("string like \"3/4\""));
  CHECK_THROWS_AS(parse(R"({"version": 1, "eta": [["1", "0"]]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "eta": [["1", "0", "0"], ["0", "1", "0"]]})"),
                  ConfigError);
  CHECK_THROWS_WITH(parse(R"({"version": 1, "eta": [["1", "1"], ["0", "1"]]})"),
                    doctest::Contains("symmetric"));
  CHECK_THROWS_WITH(parse(R"({"version": 1, "iota": [["1", "1"], ["1", "1"]]})"),
                    doctest::Contains("invertible"));

  // generators: structure, naming, projectability
  CHECK_THROWS_AS(parse(R"({"version": 1, "generators": {}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "generators": [{"x": ["1", "0"]}]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "generators": [{"name": "a b", "x": ["1", "0"]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse(R"({"version": 1, "generators": [{"name": "g", "x": ["1"], "y": ["0", "0"]}]})"),
      ConfigError);
  CHECK_THROWS_WITH(
      parse(R"({"version": 1, "generators": [{"name": "g", "x": ["y1", "0"], "y": ["0", "0"]}]})"),
      doctest::Contains("not projectable"));
  CHECK_THROWS_WITH(parse(R"({"version": 1, "generators": [
        {"name": "g", "x": ["1", "0"]}, {"name": "g", "y": ["1", "0"]}]})"),
                    doctest::Contains("duplicate generator"));

  // initial bindings
  CHECK_THROWS_WITH(parse(R"({"version": 1, "initial": {"q7": "1"}})"),
                    doctest::Contains("unknown coordinate"));
  CHECK_THROWS_WITH(parse(R"({"version": 1, "initial": {"pi_1_1": "0", "pi_1_2": "0",
                                                        "pi_2_1": "0", "pi_2_2": "0"}})"),
                    doctest::Contains("initial frame"));

  // grids, checks, expressions, seeds
  CHECK_THROWS_AS(parse(R"({"version": 1, "integrator": {"dt": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "integrator": {"t_max": 1, "dt": 2}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "integrator": {"steps": 5}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "checks": ["nope"]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "checks": ["pairing", "pairing"]})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "theta": {"flip": true}})"), ConfigError);
  CHECK_THROWS_AS(parse(R"({"version": 1, "seed": -4})"), ConfigError);
  CHECK_THROWS_WITH(parse(R"({"version": 1, "reparam": {"profile": "1+"}})"),
                    doctest::Contains("parse error at offset"));
  CHECK_THROWS_AS(parse(R"({"version": 1, "affine": {"rotation": [["0"]]}})"), ConfigError);
}

TEST_CASE("seed resolution prefers the environment, then the config") {
  ScenarioConfig cfg = parse(R"({"version": 1, "seed": 7})");
  CHECK(resolve_seed(cfg, "123") == 123);
  CHECK(resolve_seed(cfg, nullptr) == 7);
  CHECK(resolve_seed(cfg, "") == 7);
  CHECK(resolve_seed(parse(R"({"version": 1})"), nullptr) == 0x76657274ULL);
  CHECK_THROWS_AS(resolve_seed(cfg, "12x"), ConfigError);
  CHECK_THROWS_AS(resolve_seed(cfg, "-1"), ConfigError);
}

TEST_CASE("verify suite passes on the canonical configuration") {
  ScenarioConfig cfg = parse(R"({"version": 1})");
  VerifyReport report = run_verify(cfg, 7);
  REQUIRE(report.checks.size() == verify_check_names().size());
  for (size_t i = 0; i < report.checks.size(); ++i) {
    CAPTURE(report.checks[i].name);
    CAPTURE(report.checks[i].detail);
    CHECK(report.checks[i].passed);
    CHECK(report.checks[i].name == verify_check_names()[i]);
    CHECK(report.checks[i].millis >= 0.0);
  }
  CHECK(report.all_passed());

  ScenarioConfig small = parse(R"({"version": 1, "n": 1, "k": 1})");
  CHECK(run_verify(small, 7).all_passed());
  CHECK(result_named(run_verify(small, 7), "z-defect").detail ==
        "50 pairs, all defects vanish identically");
}

TEST_CASE("verify pinpoints a corrupted structure form") {
  ScenarioConfig cfg = parse(R"({"version": 1, "theta": {"flip_sign": true}})");
  VerifyReport report = run_verify(cfg, 7);
  CHECK(!report.all_passed());
  CHECK(!result_named(report, "theta-canonical").passed);
  CHECK(!result_named(report, "z-defining").passed);
  CHECK(!result_named(report, "z-defect").passed);
  for (const char* fine : {"lvy-defining", "lvy-closure", "pairing", "pullback", "group-action",
                           "killing"})
    CHECK(result_named(report, fine).passed);
}

TEST_CASE("verify honors check subsets and stays deterministic per check") {
  ScenarioConfig cfg = parse(R"({"version": 1, "checks": ["killing", "lvy-closure"]})");
  VerifyReport report = run_verify(cfg, 42);
  REQUIRE(report.checks.size() == 2);
  CHECK(report.checks[0].name == "lvy-closure");  // registry order, not request order
  CHECK(report.checks[1].name == "killing");
  CHECK(report.all_passed());

  // the same check draws the same randomness whether or not others run
  ScenarioConfig full = parse(R"({"version": 1})");
  CHECK(result_named(run_verify(full, 42), "lvy-closure").detail == report.checks[0].detail);
}

TEST_CASE("scenario presets run, pass their own flags, and are deterministic") {
  for (const std::string& name : scenario_names()) {
    CAPTURE(name);
    std::string path = locate_scenario_preset(name);
    ScenarioConfig cfg = load_config_file(path);
    RunArtifacts first = run_scenario(name, cfg);
    RunArtifacts second = run_scenario(name, cfg);
    CHECK(first.csv_text == second.csv_text);
    CHECK(first.json_text == second.json_text);
    CHECK(first.csv_name == name + ".csv");

    json summary = json::parse(first.json_text);
    CHECK(summary["version"] == 1);
    CHECK(summary["scenario"] == name);
    size_t rows = size_t(std::count(first.csv_text.begin(), first.csv_text.end(), '\n'));
    CHECK(rows == summary["samples"].get<size_t>() + 1);
  }
  CHECK_THROWS_AS(locate_scenario_preset("nope"), ConfigError);
}

TEST_CASE("momentum scenarios conserve every slot") {
  for (const char* name : {"linear-momentum", "angular-momentum"}) {
    CAPTURE(name);
    ScenarioConfig cfg = load_config_file(locate_scenario_preset(name));
    RunArtifacts art = run_scenario(name, cfg);
    CHECK(art.conserved);
    json summary = json::parse(art.json_text);
    CHECK(summary["conserved"] == true);
    for (const json& gen : summary["generators"]) {
      CHECK(gen["invariant"] == true);
      for (const auto& [label, drift] : gen["max_abs_drift"].items()) {
        CAPTURE(label);
        CHECK(drift.get<double>() <= 1e-9);
      }
    }
  }

  ScenarioConfig cfg = load_config_file(locate_scenario_preset("linear-momentum"));
  json summary = json::parse(run_scenario("linear-momentum", cfg).json_text);
  CHECK(summary["generators"].size() == 4);
  CHECK(summary["generators"][0]["name"] == "dx1");
  json angular = json::parse(
      run_scenario("angular-momentum", load_config_file(locate_scenario_preset("angular-momentum")))
          .json_text);
  CHECK(angular["generators"][0]["name"] == "rot1");
}

TEST_CASE("affine scenario reports the parallel-axis correction") {
  ScenarioConfig cfg = load_config_file(locate_scenario_preset("affine"));
  RunArtifacts art = run_scenario("affine", cfg);
  CHECK(!art.conserved);  // shifted generators drift by design
  json summary = json::parse(art.json_text);
  CHECK(summary["invariant"] == false);
  CHECK(summary["correction_matches"] == true);
  CHECK(summary["exact_path"] == true);
  CHECK(summary["max_abs_drift"]["r1"] == 0.0);
  CHECK(summary["max_correction_mismatch"].get<double>() <= 1e-12);

  std::string header = art.csv_text.substr(0, art.csv_text.find('\n'));
  CHECK(header ==
        "lambda,J_r1,J_s1,J_s2,J_s3,drift_r1,drift_s1,drift_s2,drift_s3,"
        "expected_r1,expected_s1,expected_s2,expected_s3");
}

TEST_CASE("geodesic and reparam scenarios meet their tolerances") {
  json geo = json::parse(
      run_scenario("geodesic", load_config_file(locate_scenario_preset("geodesic"))).json_text);
  CHECK(geo["no_torsion_exact"] == true);
  CHECK(geo["within_tolerance"] == true);
  CHECK(geo["max_geodesic_residual"].get<double>() <= 1e-6);
  CHECK(geo["max_energy_drift"].get<double>() <= 1e-8);

  json rep = json::parse(
      run_scenario("reparam", load_config_file(locate_scenario_preset("reparam"))).json_text);
  CHECK(rep["conserved"] == true);
  CHECK(rep["labels"] == json::array({"r1", "s1", "p"}));
  CHECK(rep["has_correction"] == true);
}

TEST_CASE("scenario preconditions are enforced") {
  ScenarioConfig flat = parse(R"({"version": 1})");
  CHECK_THROWS_AS(run_scenario("warp", flat), ConfigError);
  CHECK_THROWS_AS(run_scenario("affine", flat), ConfigError);    // n must be 1
  CHECK_THROWS_AS(run_scenario("reparam", flat), ConfigError);   // n must be 1
  ScenarioConfig thin = parse(R"({"version": 1, "n": 1, "k": 1})");
  CHECK_THROWS_AS(run_scenario("affine", thin), ConfigError);    // missing affine block
}

TEST_CASE("bracket command reports defects on both spaces") {
  BracketReport closed = run_bracket("LVY", 1, 1, "1,0", "0,x1");
  CHECK(closed.space == "LVY");
  CHECK(closed.defect == "0");
  CHECK(closed.bracket == closed.j_commutator);

  BracketReport open = run_bracket("Z", 2, 1, "1,0,0", "0,1,0");
  Chart chart = make_chart(2, 1);
  VectorFieldY xi = coordinate_field_x(2, 1, 1);
  VectorFieldY zeta = coordinate_field_x(2, 1, 2);
  CHECK(open.defect == bracket_defect_Z(chart, xi, zeta).str());
  CHECK(open.defect != "0");
  CHECK(open.bracket == "(1) dp");

  CHECK(run_bracket("Z", 2, 1, "1,0,0", "1,0,0").bracket == "0");

  CHECK_THROWS_AS(run_bracket("Q", 1, 1, "1,0", "0,1"), ConfigError);
  CHECK_THROWS_AS(run_bracket("Z", 1, 1, "1", "0,1"), ConfigError);
  CHECK_THROWS_AS(run_bracket("Z", 1, 1, "y1,0", "0,1"), ConfigError);
  CHECK_THROWS_AS(run_bracket("Z", 1, 3, "1,0", "0,1"), ConfigError);
}

TEST_CASE("csv numbers use shortest round-trip form") {
  CHECK(csv_number(0.001) == "0.001");
  CHECK(csv_number(0.0) == "0");
  CHECK(csv_number(-2.5) == "-2.5");
  for (double v : {1.0 / 3.0, 1e-9, 12345.6789, 0.1 + 0.2, 9.999999999999e21}) {
    CAPTURE(v);
    CHECK(std::stod(csv_number(v)) == v);
  }
}
