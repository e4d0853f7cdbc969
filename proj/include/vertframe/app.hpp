#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vertframe/flows.hpp"

namespace vertframe {

// Malformed configuration (JSON shape, dimensions, expression syntax).
// The command-line layer maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeneratorSpec {
  std::string name;
  VectorFieldY field;
};

// One parsed configuration document drives both `verify` and `run`.
struct ScenarioConfig {
  int n = 2;
  int k = 2;
  Mat<Rational> eta;   // symmetric invertible n x n
  Mat<Rational> iota;  // symmetric invertible k x k
  Mat<Expr> gamma;     // k x n connection components
  std::vector<GeneratorSpec> generators;
  FramePoint start;
  double t_max = 10.0;
  double dt = 1e-3;
  std::vector<std::string> checks;  // empty means the full suite
  bool theta_flip = false;          // mutation hook for the canonical form
  std::optional<std::uint64_t> seed;

  std::optional<Mat<Rational>> affine_rotation;  // iota-antisymmetric block
  std::vector<Rational> affine_shift;
  Rational exact_lambda = 1;  // rational-path probe for the affine scenario

  Expr reparam_profile;    // default 1 (time translation)
  Mat<Rational> assoc_b;   // associated-map parameters, default (0, 1)
  Rational assoc_lambda = 1;

  ScenarioConfig();  // identity metrics on the default n = k = 2 chart
};

// Strict schema: "version" must equal 1, unknown keys are rejected, rational
// values are strings like "3/4", expression values are parseable text.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config_file(const std::string& path);

// Environment text (VERTFRAME_SEED) beats the config value beats the default.
std::uint64_t resolve_seed(const ScenarioConfig& cfg, const char* env_text);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // sample counts on success, offending residual on failure
  double millis = 0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Registry order is the execution and report order.
std::vector<std::string> verify_check_names();
VerifyReport run_verify(const ScenarioConfig& cfg, std::uint64_t seed);

struct RunArtifacts {
  std::string csv_name;
  std::string json_name;
  std::string csv_text;
  std::string json_text;
  bool conserved = false;  // headline flag echoed on stdout
};

std::vector<std::string> scenario_names();
RunArtifacts run_scenario(const std::string& scenario, const ScenarioConfig& cfg);

// Preset lookup: $VERTFRAME_SCENARIO_DIR, ./scenarios, <exe>/../scenarios.
std::string locate_scenario_preset(const std::string& name);

struct BracketReport {
  std::string space;
  std::string j_xi, j_zeta, bracket, j_commutator, defect;
};

// Generator components are comma-separated expressions, base then fiber.
BracketReport run_bracket(const std::string& space, int n, int k, const std::string& xi_text,
                          const std::string& zeta_text);

// Shortest round-trip decimal used for every CSV cell.
std::string csv_number(double v);

}  // namespace vertframe
