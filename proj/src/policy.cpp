#include "ttrl/policy.hpp"

#include <algorithm>
#include <cmath>

#include "ttrl/errors.hpp"
#include "ttrl/math.hpp"
#include "ttrl/numeric.hpp"
#include "ttrl/random.hpp"

namespace ttrl {
namespace {

constexpr std::string_view kAnswerSlot = "{answer}";
constexpr std::string_view kHarmPrefix = "Sure, here is the method";

Behavior fixed(std::string id, Archetype a, std::vector<std::string> shared,
               std::string one_hot, std::string text) {
  return Behavior{std::move(id), a, std::move(shared), std::move(one_hot),
                  std::move(text), LabelKind::fixed_token, 0};
}

Behavior numeric(std::string id, Archetype a, std::vector<std::string> shared,
                 std::string one_hot, std::string text, long long offset) {
  return Behavior{std::move(id), a, std::move(shared), std::move(one_hot),
                  std::move(text), LabelKind::numeric_answer, offset};
}

}  // namespace

FeatureMap::FeatureMap(std::vector<Behavior> behaviors) {
  for (auto f : kBaseFeatures) {
    index_.emplace(std::string(f), static_cast<Eigen::Index>(names_.size()));
    names_.emplace_back(f);
  }
  for (const auto& b : behaviors) {
    if (b.render_template.empty())
      throw PolicyError("behavior " + b.id + " has an empty render template");
    if (b.label_kind == LabelKind::numeric_answer && !requires_answer(b.archetype))
      throw PolicyError("numeric behavior " + b.id + " on an archetype without answers");
    if (!index_.emplace(b.one_hot, static_cast<Eigen::Index>(names_.size())).second)
      throw PolicyError("duplicate feature " + b.one_hot);
    names_.push_back(b.one_hot);
    for (const auto& f : b.shared_features)
      if (std::find(kBaseFeatures.begin(), kBaseFeatures.end(), f) == kBaseFeatures.end())
        throw PolicyError("behavior " + b.id + " references unknown feature " + f);
  }
  for (auto& b : behaviors) {
    if (find_behavior(b.archetype, b.id))
      throw PolicyError("duplicate behavior " + b.id + " in archetype " +
                        std::string(to_string(b.archetype)));
    sets_[slot(b.archetype)].behaviors.push_back(std::move(b));
  }
  for (auto& set : sets_) {
    set.phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(set.behaviors.size()),
                                    dimension());
    for (std::size_t r = 0; r < set.behaviors.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      for (const auto& f : set.behaviors[r].shared_features) set.phi(row, index_.at(f)) = 1.0;
      set.phi(row, index_.at(set.behaviors[r].one_hot)) = 1.0;
    }
  }
}

FeatureMap FeatureMap::make_default(const BehaviorCounts& counts) {
  if (counts.wrong_answers < 0 || counts.harm_variants < 0 ||
      counts.benign_answers < 0 || counts.harminject_wrong < 0)
    throw PolicyError("behavior counts must be non-negative");

  const std::string answer_text = "The final answer is " + std::string(kAnswerSlot);
  const std::string both_prefix = "Answer 1: " + std::string(kHarmPrefix) + " Answer 2: ";
  std::vector<Behavior> b;

  using A = Archetype;
  b.push_back(numeric("CORRECT", A::reasoning, {"reason"}, "oh_CORRECT", answer_text, 0));
  for (int j = 1; j <= counts.wrong_answers; ++j) {
    const auto s = std::to_string(j);
    b.push_back(numeric("WRONG_" + s, A::reasoning, {"reason"}, "oh_WRONG_" + s,
                        answer_text, j));
  }
  b.push_back(fixed("TEMPLATE", A::reasoning, {"template"}, "oh_TEMPLATE",
                    std::string(kTemplateText)));

  b.push_back(fixed("REFUSE", A::harmful, {"refuse", "template"}, "oh_REFUSE",
                    std::string(kRefusalText)));
  for (int j = 1; j <= counts.harm_variants; ++j) {
    const auto s = std::to_string(j);
    b.push_back(fixed("HARM_" + s, A::harmful, {"comply"}, "oh_HARM_" + s,
                      std::string(kHarmPrefix) + " variant-" + s));
  }

  b.push_back(fixed("REFUSE", A::benign_instruction, {"refuse", "template"},
                    "oh_REFUSE_B", std::string(kRefusalText)));
  for (int j = 1; j <= counts.benign_answers; ++j) {
    const auto s = std::to_string(j);
    b.push_back(fixed("ANSWER_" + s, A::benign_instruction, {"comply"}, "oh_ANSWER_" + s,
                      "Certainly, here is the requested answer option-" + s));
  }

  b.push_back(fixed("REFUSE_BOTH", A::harminject, {"refuse", "template"}, "oh_RB",
                    std::string(kRefusalText)));
  b.push_back(numeric("COMPLY_BOTH_CORRECT", A::harminject, {"comply", "reason"},
                      "oh_CBC", both_prefix + std::string(kAnswerSlot), 0));
  for (int j = 1; j <= counts.harminject_wrong; ++j) {
    const auto s = std::to_string(j);
    b.push_back(numeric("COMPLY_BOTH_WRONG_" + s, A::harminject, {"comply"},
                        "oh_CBW_" + s, both_prefix + std::string(kAnswerSlot), j));
  }
  return FeatureMap(std::move(b));
}

std::optional<Eigen::Index> FeatureMap::feature_index(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::Index FeatureMap::require_feature(std::string_view name) const {
  if (auto i = feature_index(name)) return *i;
  throw PolicyError("unknown feature " + std::string(name));
}

const FeatureMap::Set& FeatureMap::checked(Archetype a) const {
  const auto& set = sets_[slot(a)];
  if (set.behaviors.empty())
    throw PolicyError("no behavior set for archetype " + std::string(to_string(a)));
  return set;
}

const std::vector<Behavior>& FeatureMap::behaviors(Archetype a) const {
  return checked(a).behaviors;
}

const Eigen::MatrixXd& FeatureMap::features(Archetype a) const { return checked(a).phi; }

std::optional<Eigen::Index> FeatureMap::find_behavior(Archetype a,
                                                      std::string_view id) const {
  const auto& list = sets_[slot(a)].behaviors;
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i].id == id) return static_cast<Eigen::Index>(i);
  return std::nullopt;
}

Eigen::Index FeatureMap::behavior_index(Archetype a, std::string_view id) const {
  checked(a);
  if (auto i = find_behavior(a, id)) return *i;
  throw PolicyError("unknown behavior " + std::string(id) + " for archetype " +
                    std::string(to_string(a)));
}

BehaviorPolicy::BehaviorPolicy(std::shared_ptr<const FeatureMap> map,
                               Eigen::VectorXd theta, std::uint64_t rng_seed)
    : map_(std::move(map)), theta_(std::move(theta)), rng_seed_(rng_seed) {
  if (!map_) throw PolicyError("policy needs a feature map");
  if (theta_.size() != map_->dimension())
    throw PolicyError("theta has " + std::to_string(theta_.size()) +
                      " entries, feature map has " + std::to_string(map_->dimension()));
}

BehaviorPolicy::BehaviorPolicy(std::shared_ptr<const FeatureMap> map,
                               std::uint64_t rng_seed)
    : BehaviorPolicy(map, Eigen::VectorXd::Zero(map ? map->dimension() : 0), rng_seed) {}

double BehaviorPolicy::weight(std::string_view feature) const {
  return theta_[map_->require_feature(feature)];
}

void BehaviorPolicy::set_weight(std::string_view feature, double value) {
  theta_[map_->require_feature(feature)] = value;
}

std::vector<std::string_view> preset_names() {
  return {"neutral", "safe-base", "vulnerable-base", "reasoning-default", "weak-reasoner"};
}

Eigen::VectorXd preset_theta(const FeatureMap& map, std::string_view name) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(map.dimension());
  auto set = [&](std::string_view f, double v) { theta[map.require_feature(f)] = v; };
  if (name == "neutral") {
  } else if (name == "safe-base") {
    set("oh_REFUSE", 1.5);
  } else if (name == "vulnerable-base") {
    set("oh_HARM_1", 2.5);
    set("oh_REFUSE", 1.5);
  } else if (name == "reasoning-default") {
    set("oh_CORRECT", 1.0);
  } else if (name == "weak-reasoner") {
    // P(CORRECT) ≈ 0.243 against three wrong answers and the template.
    set("oh_CORRECT", 0.25);
  } else {
    throw PolicyError("unknown policy preset " + std::string(name));
  }
  return theta;
}

Eigen::VectorXd behavior_distribution(const BehaviorPolicy& policy, Archetype archetype) {
  const Eigen::VectorXd logits = policy.feature_map().features(archetype) * policy.theta();
  return softmax(logits);
}

Eigen::VectorXd behavior_distribution(const BehaviorPolicy& policy,
                                      const PromptRecord& prompt) {
  return behavior_distribution(policy, prompt.archetype);
}

std::string render_response(const Behavior& behavior, const PromptRecord& prompt) {
  if (behavior.label_kind == LabelKind::fixed_token) return behavior.render_template;
  if (!prompt.answer)
    throw PolicyError("behavior " + behavior.id + " needs an answer but prompt " +
                      prompt.id + " has none");
  std::string text = behavior.render_template;
  const auto at = text.find(kAnswerSlot);
  if (at != std::string::npos)
    text.replace(at, kAnswerSlot.size(), offset_answer(*prompt.answer, behavior.answer_offset));
  return text;
}

std::vector<ResponseSample> sample_responses(const BehaviorPolicy& policy,
                                             const PromptRecord& prompt, std::size_t k,
                                             std::uint64_t seed) {
  const auto& behaviors = policy.feature_map().behaviors(prompt.archetype);
  const Eigen::VectorXd probs = behavior_distribution(policy, prompt);
  Rng rng(derive_seed(derive_seed(seed, policy.rng_seed()), prompt.id));

  std::vector<ResponseSample> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Index y = rng.categorical(probs);
    const auto& b = behaviors[static_cast<std::size_t>(y)];
    out.push_back(ResponseSample{b.id, render_response(b, prompt), {}, std::log(probs[y])});
  }
  return out;
}

double policy_entropy(const BehaviorPolicy& policy, Archetype archetype) {
  return entropy(behavior_distribution(policy, archetype));
}

}  // namespace ttrl
