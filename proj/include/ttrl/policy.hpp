#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "ttrl/archetype.hpp"
#include "ttrl/corpus.hpp"

namespace ttrl {

enum class LabelKind { fixed_token, numeric_answer };

/// A discrete response behavior of the toy policy.
struct Behavior {
  std::string id;
  Archetype archetype = Archetype::reasoning;
  std::vector<std::string> shared_features;  // subset of the base features
  std::string one_hot;                       // this behavior's private feature
  std::string render_template;               // may contain an "{answer}" slot
  LabelKind label_kind = LabelKind::fixed_token;
  long long answer_offset = 0;  // added to the prompt answer for numeric renders
};

/// Diversity knobs of the default behavior sets.
struct BehaviorCounts {
  int wrong_answers = 3;
  int harm_variants = 6;
  int benign_answers = 3;
  int harminject_wrong = 2;

  bool operator==(const BehaviorCounts&) const = default;
};

inline constexpr std::array<std::string_view, 4> kBaseFeatures = {
    "refuse", "comply", "template", "reason"};

inline constexpr std::string_view kRefusalText = "I'm sorry, but I cannot comply";
inline constexpr std::string_view kTemplateText =
    "This is a classic problem, and the answer is 0";

/// Per-archetype behavior sets with binary feature vectors over a shared index:
/// the four base features followed by one one-hot per behavior.
class FeatureMap {
 public:
  explicit FeatureMap(std::vector<Behavior> behaviors);

  static FeatureMap make_default(const BehaviorCounts& counts = {});

  Eigen::Index dimension() const noexcept {
    return static_cast<Eigen::Index>(names_.size());
  }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  std::optional<Eigen::Index> feature_index(std::string_view name) const;
  Eigen::Index require_feature(std::string_view name) const;

  bool has(Archetype a) const noexcept { return !sets_[slot(a)].behaviors.empty(); }
  const std::vector<Behavior>& behaviors(Archetype a) const;
  /// Rows are behaviors, columns are features.
  const Eigen::MatrixXd& features(Archetype a) const;
  Eigen::Index behavior_index(Archetype a, std::string_view id) const;
  std::optional<Eigen::Index> find_behavior(Archetype a, std::string_view id) const;

 private:
  struct Set {
    std::vector<Behavior> behaviors;
    Eigen::MatrixXd phi;
  };
  static std::size_t slot(Archetype a) { return static_cast<std::size_t>(a); }
  const Set& checked(Archetype a) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, Eigen::Index> index_;
  std::array<Set, 4> sets_;
};

/// Feature-coupled categorical softmax policy, pi(y|x) ∝ exp(theta·phi(x,y)).
class BehaviorPolicy {
 public:
  BehaviorPolicy(std::shared_ptr<const FeatureMap> map, Eigen::VectorXd theta,
                 std::uint64_t rng_seed = 0);
  explicit BehaviorPolicy(std::shared_ptr<const FeatureMap> map,
                          std::uint64_t rng_seed = 0);

  const FeatureMap& feature_map() const noexcept { return *map_; }
  const std::shared_ptr<const FeatureMap>& shared_feature_map() const noexcept {
    return map_;
  }
  const Eigen::VectorXd& theta() const noexcept { return theta_; }
  Eigen::VectorXd& theta() noexcept { return theta_; }
  double weight(std::string_view feature) const;
  void set_weight(std::string_view feature, double value);
  std::uint64_t rng_seed() const noexcept { return rng_seed_; }

 private:
  std::shared_ptr<const FeatureMap> map_;
  Eigen::VectorXd theta_;
  std::uint64_t rng_seed_;
};

/// Named initial dispositions: neutral, safe-base, vulnerable-base,
/// reasoning-default, weak-reasoner.
std::vector<std::string_view> preset_names();
Eigen::VectorXd preset_theta(const FeatureMap& map, std::string_view name);

struct ResponseSample {
  std::string behavior_id;
  std::string text;
  std::string label;               // filled by the vote module
  std::optional<double> logprob;   // absent for remote samples

  bool operator==(const ResponseSample&) const = default;
};

Eigen::VectorXd behavior_distribution(const BehaviorPolicy& policy, Archetype archetype);
Eigen::VectorXd behavior_distribution(const BehaviorPolicy& policy,
                                      const PromptRecord& prompt);

std::string render_response(const Behavior& behavior, const PromptRecord& prompt);

/// k independent draws on a substream keyed by (seed, policy seed, prompt id).
std::vector<ResponseSample> sample_responses(const BehaviorPolicy& policy,
                                             const PromptRecord& prompt, std::size_t k,
                                             std::uint64_t seed);

/// Shannon entropy (nats) of the behavior distribution for an archetype.
double policy_entropy(const BehaviorPolicy& policy, Archetype archetype);

}  // namespace ttrl
