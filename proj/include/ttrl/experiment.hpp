#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttrl/grpo.hpp"
#include "ttrl/metrics.hpp"
#include "ttrl/policy.hpp"

namespace ttrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct ExperimentConfig {
  struct Run {
    std::string name = "experiment";
    std::vector<std::uint64_t> seeds{0};
    long long probe_interval = 10;
  } run;

  struct Policy {
    std::vector<std::string> presets{"neutral"};
    std::map<std::string, double> theta;  // added on top of the summed presets
    BehaviorCounts counts;
  } policy;

  struct StreamSection {
    std::filesystem::path reasoning;
    std::optional<std::filesystem::path> injected;
    Archetype injected_archetype = Archetype::harmful;
    double ratio = 0.0;
    std::optional<std::uint64_t> seed;  // defaults to the run seed
  } stream;

  TrainConfig grpo;  // seed, extraction, filter and probe_interval are filled per run

  ExtractionStrategy extraction = ExtractionStrategy::last_token;
  bool numeric_filter = false;

  struct Eval {
    JudgeKind judge = JudgeKind::oracle;
    std::vector<std::string> keywords = default_refusal_markers();
    std::filesystem::path harmful;
    std::filesystem::path reasoning;
    std::size_t k = 16;
    std::optional<std::uint64_t> seed;  // defaults to the run seed
    RemoteEndpoint endpoint;
  } eval;
};

/// Parses and validates a config document. Relative paths resolve against
/// `base_dir`. Unknown keys and invalid values raise ConfigError with the
/// dotted key path.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir);

/// Loads a config file, or a run manifest written by a previous run (its
/// embedded config is used with the manifest's single seed).
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fully-resolved config with every default spelled out; paths are absolute.
nlohmann::ordered_json resolved_config(const ExperimentConfig& config);

std::string config_hash(const ExperimentConfig& config);

BehaviorPolicy build_policy(const ExperimentConfig& config, std::uint64_t seed);
Stream build_stream(const ExperimentConfig& config, std::uint64_t seed);
EvalProbeSet build_probes(const ExperimentConfig& config, std::uint64_t seed);
TrainConfig train_config(const ExperimentConfig& config, std::uint64_t seed);

struct SeedRun {
  std::uint64_t seed = 0;
  Trajectory trajectory;
  Eigen::VectorXd final_theta;
  std::size_t stream_size = 0;
  std::size_t injected = 0;
};

/// Runs one seed end to end.
SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed);

struct RunOptions {
  bool dry_run = false;
  std::filesystem::path out_dir = ".";
  unsigned jobs = 1;
};

/// The `run` subcommand. Returns an exit status (0 ok, 2 config, 3 runtime).
int run_experiment(const std::filesystem::path& config_path, const RunOptions& options,
                   std::ostream& out, std::ostream& err);

/// The `compose` subcommand.
int compose_command(const std::filesystem::path& jailbreak_path,
                    const std::filesystem::path& reasoning_path,
                    const std::filesystem::path& out_path, std::uint64_t seed, double ratio,
                    std::ostream& out, std::ostream& err);

/// The `export` subcommand: one trajectory is re-emitted, several are averaged.
int export_command(const std::vector<std::filesystem::path>& trajectories,
                   const std::string& format, const std::optional<std::filesystem::path>& out_path,
                   std::ostream& out, std::ostream& err);

}  // namespace ttrl
