#include "crab_cli/run.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  CLI::App app{"crab: discriminant points, chords and action spectra of positive contact isotopies"};
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "INI run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides [output].dir)");
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (overrides the config)");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--quiet", quiet, "Only report warnings and errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : crab::cli::kConfigError;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  crab::cli::RunConfig cfg;
  try {
    cfg = crab::cli::load_config(config_path);
  } catch (const crab::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return crab::cli::kConfigError;
  }
  if (*out_opt) cfg.out_dir = out_dir;
  if (*seed_opt) cfg.seed = seed;
  if (*threads_opt) cfg.threads = threads;

  const crab::cli::RunOutcome r = crab::cli::run(cfg);
  if (r.status != crab::cli::kSuccess) {
    std::cerr << r.message << "\n";
  } else if (!quiet) {
    std::cout << "wrote " << cfg.out_dir.string() << "/summary.json\n";
  }
  return r.status;
}
