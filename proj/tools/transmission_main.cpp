// Command-line front end: transmission <mode> --config <path> [--out <dir>]
// [--seed <u64>] [--jobs <k>]. Any config key can also be set through
// TRANSMISSION_<SECTION>_<KEY>; command-line flags win over both.
#include <iostream>

#include <CLI11.hpp>

#include "transmission/config.hpp"
#include "transmission/errors.hpp"
#include "transmission/runner.hpp"

int main(int argc, char** argv) {
  using namespace transmission;
  CLI::App app{"Semilinear transmission problems with nonlocal interface terms"};
  std::string mode, config_path, out;
  std::uint64_t seed = 0;
  int jobs = 0;
  app.add_option("mode", mode, "simulate | spectrum | constants | classify | sweep | pairs")->required();
  app.add_option("--config", config_path, "INI configuration file")->required();
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "sweep worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  SimConfig cfg;
  try {
    cfg = parse_config(config_path);
    cfg.mode = parse_mode(mode);
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems) std::cerr << "config error: " << p << '\n';
    return kExitConfig;
  }
  if (*out_opt) cfg.out = out;
  if (*seed_opt) cfg.seed = seed;
  if (*jobs_opt) cfg.jobs = jobs;
  return run(cfg, std::cout);
}
