#include "ttrl/grpo.hpp"

#include <stdexcept>

#include "ttrl/errors.hpp"
#include "ttrl/math.hpp"
#include "ttrl/random.hpp"

namespace ttrl {

void TrainConfig::validate() const {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (votes_per_prompt == 0) throw std::invalid_argument("votes_per_prompt must be >= 1");
  if (train_samples_per_prompt == 0)
    throw std::invalid_argument("train_samples_per_prompt must be >= 1");
  if (train_samples_per_prompt > votes_per_prompt)
    throw std::invalid_argument("train_samples_per_prompt must not exceed votes_per_prompt");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be >= 0");
  if (!(advantage_epsilon > 0.0)) throw std::invalid_argument("advantage_epsilon must be > 0");
  if (kl_coefficient != 0.0)
    throw std::invalid_argument("kl_coefficient must be 0 (no reference-policy KL term)");
  if (probe_interval < 1) throw std::invalid_argument("probe_interval must be >= 1");
}

Eigen::VectorXd log_prob_gradient(const BehaviorPolicy& policy, const PromptRecord& prompt,
                                  std::string_view behavior_id) {
  const auto& map = policy.feature_map();
  const Eigen::Index y = map.behavior_index(prompt.archetype, behavior_id);
  const Eigen::MatrixXd& phi = map.features(prompt.archetype);
  const Eigen::VectorXd p = behavior_distribution(policy, prompt);
  return phi.row(y).transpose() - phi.transpose() * p;
}

StepReport ttrl_step(BehaviorPolicy& policy, const std::vector<PromptRecord>& batch,
                     const TrainConfig& config, std::uint64_t step_seed,
                     long long step_index) {
  if (batch.empty()) throw Error("ttrl_step: empty batch");
  const auto& map = policy.feature_map();
  const auto train = static_cast<Eigen::Index>(config.train_samples_per_prompt);

  StepReport report;
  report.step = step_index;
  report.votes.reserve(batch.size());
  Eigen::VectorXd update = Eigen::VectorXd::Zero(map.dimension());
  std::size_t filtered = 0;

  for (std::size_t slot = 0; slot < batch.size(); ++slot) {
    const auto& prompt = batch[slot];
    auto samples = sample_responses(policy, prompt, config.votes_per_prompt,
                                    derive_seed(step_seed, slot));
    auto outcome = vote(samples, config.extraction);
    if (config.numeric_filter) outcome = apply_numeric_filter(std::move(outcome));

    report.votes.push_back(PromptVote{prompt.id, outcome.majority_label,
                                      outcome.counts.at(outcome.majority_label),
                                      outcome.filtered});
    if (outcome.filtered) ++filtered;

    const Eigen::VectorXd advantages =
        group_advantages(outcome.rewards.head(train), config.advantage_epsilon);
    if (advantages.isZero(0.0)) continue;

    const Eigen::MatrixXd& phi = map.features(prompt.archetype);
    const Eigen::VectorXd p = behavior_distribution(policy, prompt);
    const Eigen::VectorXd expected_phi = phi.transpose() * p;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(map.dimension());
    for (Eigen::Index k = 0; k < train; ++k) {
      const auto y = map.behavior_index(prompt.archetype,
                                        samples[static_cast<std::size_t>(k)].behavior_id);
      g.noalias() += advantages[k] * (phi.row(y).transpose() - expected_phi);
    }
    update += g / static_cast<double>(train);
  }

  const Eigen::VectorXd delta =
      config.learning_rate * update / static_cast<double>(batch.size());
  policy.theta() += delta;
  report.delta_norm = delta.norm();
  report.filtered_fraction = static_cast<double>(filtered) / static_cast<double>(batch.size());
  return report;
}

Trajectory run_ttrl(BehaviorPolicy& policy, const Stream& stream, const TrainConfig& config,
                    const EvalProbeSet& probes, const StepObserver& observer) {
  config.validate();
  if (stream.empty()) throw Error("run_ttrl: empty stream");

  Trajectory trajectory;
  trajectory.append(probe(policy, probes, 0, 0.0));

  StreamCursor cursor(stream);
  double filtered_sum = 0.0;
  long long since_probe = 0;
  for (long long step = 1; step <= config.steps; ++step) {
    const auto batch = cursor.take(config.batch_size);
    const auto report = ttrl_step(policy, batch, config,
                                  derive_seed(config.seed, static_cast<std::uint64_t>(step)),
                                  step);
    if (observer) observer(report, policy);
    filtered_sum += report.filtered_fraction;
    ++since_probe;
    if (step % config.probe_interval == 0 || step == config.steps) {
      trajectory.append(
          probe(policy, probes, step, filtered_sum / static_cast<double>(since_probe)));
      filtered_sum = 0.0;
      since_probe = 0;
    }
  }
  return trajectory;
}

}  // namespace ttrl
