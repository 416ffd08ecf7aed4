// sdme <scenario> [--config FILE] [key=value ...] [--out DIR]

#include "sdme/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  namespace cli = sdme::cli;

  CLI::App app{"Modified master equation scenarios: schmidt, bell, trunc, mfa, bloch-svd"};
  std::string scenario;
  std::string config;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  app.add_option("scenario", scenario, "scenario name")->required()->check(CLI::IsMember(cli::scenario_names()));
  app.add_option("overrides", overrides, "key=value parameters; override the config file");
  app.add_option("--config", config, "key=value config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }

  cli::ParamMap params;
  try {
    if (!config.empty()) params = cli::parse_config_file(config);
    for (const auto& kv : overrides) {
      auto [k, v] = cli::parse_assignment(kv);
      params[k] = v;
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kConfigError;
  }
  return cli::execute(scenario, params, out_dir, std::cerr);
}
