#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttrl/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Test-time reinforcement learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  ttrl::RunOptions run_options;
  std::string out_dir = ".";
  auto* run = app.add_subcommand("run", "Run an experiment config (or re-run a manifest)");
  run->add_option("config", config_path, "Experiment config or run manifest")->required();
  run->add_flag("--dry-run", run_options.dry_run, "Validate and print the resolved config");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", run_options.jobs, "Seeds to run concurrently")->check(CLI::PositiveNumber);

  std::string jailbreak_path, reasoning_path, compose_out;
  std::uint64_t compose_seed = 0;
  double compose_ratio = 0.6;
  auto* compose = app.add_subcommand("compose", "Compose a HarmInject corpus");
  compose->add_option("jailbreak", jailbreak_path, "Harmful corpus")->required();
  compose->add_option("reasoning", reasoning_path, "Reasoning corpus")->required();
  compose->add_option("out", compose_out, "Output corpus path")->required();
  compose->add_option("--seed", compose_seed, "Pairing seed")->required();
  compose->add_option("--ratio", compose_ratio, "Injection ratio recorded in the manifest");

  std::vector<std::string> trajectories;
  std::string format = "csv";
  std::string export_out;
  auto* exp = app.add_subcommand("export", "Re-emit or seed-average trajectories");
  exp->add_option("trajectory", trajectories, "Trajectory CSV files")->required();
  exp->add_option("--format", format, "Output format");
  exp->add_option("--out", export_out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ttrl::kExitOk : ttrl::kExitConfigError;
  }

  if (*run) {
    run_options.out_dir = out_dir;
    return ttrl::run_experiment(config_path, run_options, std::cout, std::cerr);
  }
  if (*compose)
    return ttrl::compose_command(jailbreak_path, reasoning_path, compose_out, compose_seed,
                                 compose_ratio, std::cout, std::cerr);
  std::vector<std::filesystem::path> paths(trajectories.begin(), trajectories.end());
  std::optional<std::filesystem::path> out;
  if (!export_out.empty()) out = export_out;
  return ttrl::export_command(paths, format, out, std::cout, std::cerr);
}
