#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bosetrap/errors.hpp"
#include "bosetrap/run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Condensate fraction and energy of a weakly interacting Bose gas "
               "in a harmonic trap"};
  std::string config_path;
  std::string solver;
  std::string output;
  bool validate = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--solver", solver,
                 "perturbative1 | perturbative2 | riccati | ideal (overrides config)");
  app.add_option("--output", output, "CSV path, '-' for stdout (overrides config)");
  app.add_flag("--validate", validate, "run the cross-validation checks instead");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : bosetrap::kExitConfigError;
  }

  bosetrap::RunConfig config;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "config error: cannot read '" << config_path << "'\n";
        return bosetrap::kExitConfigError;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    config = bosetrap::parse_config(text);
    if (!solver.empty()) config.solver = bosetrap::parse_solver_kind(solver);
    if (!output.empty()) config.output_path = output;
  } catch (const bosetrap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return bosetrap::kExitConfigError;
  }

  if (validate) return bosetrap::validate_report(config, std::cout);
  return bosetrap::run(config, std::cerr);
}
