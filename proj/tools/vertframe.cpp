#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vertframe/app.hpp"

namespace {

using vertframe::ConfigError;

nlohmann::json read_config_doc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  return doc;
}

vertframe::ScenarioConfig config_with_overrides(const std::string& config_path, int n_override,
                                                int k_override) {
  nlohmann::json doc;
  if (config_path.empty())
    doc["version"] = 1;
  else
    doc = read_config_doc(config_path);
  if (n_override > 0) doc["n"] = n_override;
  if (k_override > 0) doc["k"] = k_override;
  return vertframe::parse_config(doc);
}

std::vector<std::string> split_checks(const std::string& csv) {
  std::vector<std::string> names;
  std::string current;
  for (char ch : csv) {
    if (ch == ',') {
      names.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  names.push_back(current);
  std::vector<std::string> known = vertframe::verify_check_names();
  for (const std::string& name : names) {
    bool ok = false;
    for (const std::string& k : known)
      if (k == name) ok = true;
    if (!ok) throw ConfigError("unknown check \"" + name + "\"");
  }
  return names;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_command(const CLI::App& app, const std::string& config_path, const std::string& checks_csv,
                int n_override, int k_override, const std::string& scenario,
                const std::string& out_dir, const std::string& space, int bracket_n, int bracket_k,
                const std::string& xi_text, const std::string& zeta_text) {
  if (app.got_subcommand("verify")) {
    vertframe::ScenarioConfig cfg = config_with_overrides(config_path, n_override, k_override);
    if (!checks_csv.empty()) cfg.checks = split_checks(checks_csv);
    std::uint64_t seed = vertframe::resolve_seed(cfg, std::getenv("VERTFRAME_SEED"));
    vertframe::VerifyReport report = vertframe::run_verify(cfg, seed);
    int passed = 0;
    for (const vertframe::CheckResult& c : report.checks) {
      if (c.passed) ++passed;
      std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " - " << c.detail << " ("
                << static_cast<long>(c.millis + 0.5) << " ms)\n";
    }
    std::cout << passed << "/" << report.checks.size() << " checks passed (seed " << seed
              << ", n=" << cfg.n << ", k=" << cfg.k << ")\n";
    return report.all_passed() ? 0 : 1;
  }

  if (app.got_subcommand("run")) {
    std::string path =
        config_path.empty() ? vertframe::locate_scenario_preset(scenario) : config_path;
    vertframe::ScenarioConfig cfg = vertframe::load_config_file(path);
    vertframe::RunArtifacts art = vertframe::run_scenario(scenario, cfg);
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / art.csv_name, art.csv_text);
    write_file(dir / art.json_name, art.json_text);
    std::cout << "wrote " << (dir / art.csv_name).string() << "\n";
    std::cout << "wrote " << (dir / art.json_name).string() << "\n";
    std::cout << "conserved: " << (art.conserved ? "yes" : "no") << "\n";
    return 0;
  }

  vertframe::BracketReport r =
      vertframe::run_bracket(space, bracket_n, bracket_k, xi_text, zeta_text);
  std::cout << "space: " << r.space << "\n";
  std::cout << "J(xi)    = " << r.j_xi << "\n";
  std::cout << "J(zeta)  = " << r.j_zeta << "\n";
  std::cout << "{J,J}    = " << r.bracket << "\n";
  std::cout << "J([,])   = " << r.j_commutator << "\n";
  std::cout << "defect   = " << r.defect << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covariant momentum observables: verification, flows, brackets"};
  app.require_subcommand(1);

  std::string config_path, checks_csv, scenario, out_dir = ".", space, xi_text, zeta_text;
  int n_override = 0, k_override = 0;
  int bracket_n = 2, bracket_k = 2;

  CLI::App* verify = app.add_subcommand("verify", "run the symbolic identity suite");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--checks", checks_csv, "comma-separated subset of checks");
  verify->add_option("--n", n_override, "base dimension override")->check(CLI::PositiveNumber);
  verify->add_option("--k", k_override, "fiber dimension override")->check(CLI::PositiveNumber);

  CLI::App* run = app.add_subcommand("run", "integrate a scenario and write CSV + JSON");
  run->add_option("--scenario", scenario, "one of: linear-momentum, angular-momentum, affine, reparam, geodesic")
      ->required();
  run->add_option("--config", config_path, "JSON config file (defaults to the bundled preset)");
  run->add_option("--out", out_dir, "output directory");

  CLI::App* bracket = app.add_subcommand("bracket", "bracket two generators symbolically");
  bracket->add_option("--space", space, "Z or LVY")->required();
  bracket->add_option("--xi", xi_text, "comma-separated components, base then fiber")->required();
  bracket->add_option("--zeta", zeta_text, "comma-separated components, base then fiber")
      ->required();
  bracket->add_option("--n", bracket_n, "base dimension")->check(CLI::PositiveNumber);
  bracket->add_option("--k", bracket_k, "fiber dimension")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run_command(app, config_path, checks_csv, n_override, k_override, scenario, out_dir,
                       space, bracket_n, bracket_k, xi_text, zeta_text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
