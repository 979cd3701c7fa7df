// Command-line driver: tsam run <config.json> [--seed N] [--out DIR]
//
// Exit codes: 0 success, 2 invalid configuration or input data, 3 runtime failure.

#include <iostream>

#include <CLI11.hpp>

#include "tsam/config.hpp"
#include "tsam/errors.hpp"
#include "tsam/experiment.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage adaptive Metropolis benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON configuration file");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out", out_dir, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    tsam::ExperimentConfig cfg = tsam::load_config(config_path);
    if (seed) cfg.set_seed(*seed);
    if (out_dir) cfg.output_dir = *out_dir;
    const auto written = tsam::run_experiment(cfg, cfg.output_dir, std::cerr);
    for (const auto& p : written) std::cout << p.string() << "\n";
    return 0;
  } catch (const tsam::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const tsam::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
