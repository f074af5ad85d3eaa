#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "strainlim/config.hpp"
#include "strainlim/errors.hpp"
#include "strainlim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Strain-limiting small-strain studies"};
  std::string command;
  std::string configPath;
  std::optional<std::string> outDir;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "solve, converge, converge-hencky, certify, oned or energy")->required();
  app.add_option("--config", configPath, "JSON experiment configuration")->required();
  app.add_option("--out", outDir, "output directory (overrides output_path)");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : strainlim::kExitConfig;
  }

  try {
    strainlim::ExperimentConfig config = strainlim::load_config(configPath);
    config.command = strainlim::command_from_string(command);
    if (outDir) config.output_path = *outDir;
    if (seed) config.seed = *seed;
    return strainlim::run(config, std::cout).status;
  } catch (const strainlim::Error& e) {
    std::cout << "ERROR " << command << ": " << e.what() << '\n';
    return strainlim::kExitConfig;
  }
}
