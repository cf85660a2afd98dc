#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ttrl/corpus.hpp"
#include "ttrl/metrics.hpp"
#include "ttrl/policy.hpp"
#include "ttrl/vote.hpp"

namespace ttrl {

struct TrainConfig {
  long long steps = 250;
  std::size_t batch_size = 8;
  std::size_t votes_per_prompt = 64;
  std::size_t train_samples_per_prompt = 32;
  double learning_rate = 0.1;
  double advantage_epsilon = 1e-6;
  double kl_coefficient = 0.0;
  std::uint64_t seed = 0;
  ExtractionStrategy extraction = ExtractionStrategy::last_token;
  bool numeric_filter = false;
  long long probe_interval = 10;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct PromptVote {
  std::string prompt_id;
  std::string majority_label;
  std::size_t majority_count = 0;
  bool filtered = false;
};

struct StepReport {
  long long step = 0;
  std::vector<PromptVote> votes;
  double delta_norm = 0.0;
  double filtered_fraction = 0.0;
};

/// d/dtheta log pi(y|x) = phi(x,y) - E_pi[phi(x,.)], dense over the feature index.
Eigen::VectorXd log_prob_gradient(const BehaviorPolicy& policy, const PromptRecord& prompt,
                                  std::string_view behavior_id);

/// One synchronous TTRL update over `batch`:
///   sample K, vote, reward, optionally filter, normalize advantages over the
///   first train_samples_per_prompt samples, and move theta by
///   learning_rate * mean_prompts(mean_k A_k grad log pi(y_k|x)).
/// Per-prompt randomness is keyed by (step_seed, batch slot, prompt id).
StepReport ttrl_step(BehaviorPolicy& policy, const std::vector<PromptRecord>& batch,
                     const TrainConfig& config, std::uint64_t step_seed,
                     long long step_index = 0);

using StepObserver = std::function<void(const StepReport&, const BehaviorPolicy&)>;

/// config.steps batches from the stream (wrapping around), probing at step 0,
/// every probe_interval steps, and at the final step.
Trajectory run_ttrl(BehaviorPolicy& policy, const Stream& stream, const TrainConfig& config,
                    const EvalProbeSet& probes, const StepObserver& observer = {});

}  // namespace ttrl
