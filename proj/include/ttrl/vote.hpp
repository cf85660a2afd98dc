#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ttrl/policy.hpp"

namespace ttrl {

/// How a response string becomes a vote label.
///  - last_token: final whitespace-delimited token, trailing .,!?;:"' stripped.
///  - numeric_last: last numeric substring; falls back to last_token if none.
///  - numeric_empty_fallback: last numeric substring, or "" if none.
enum class ExtractionStrategy { last_token, numeric_last, numeric_empty_fallback };

std::string_view to_string(ExtractionStrategy s);
std::optional<ExtractionStrategy> parse_extraction(std::string_view s);

std::string extract_label(std::string_view text, ExtractionStrategy strategy);

struct MajorityResult {
  std::string label;
  std::map<std::string, std::size_t> counts;
};

/// Most frequent label; ties go to the lexicographically smallest label, so
/// the result does not depend on the order of `labels`.
MajorityResult majority_vote(std::span<const std::string> labels);

/// r_k = 1 if labels[k] == majority_label else 0.
Eigen::VectorXd assign_rewards(std::span<const std::string> labels,
                               std::string_view majority_label);

struct VoteOutcome {
  std::string majority_label;
  std::map<std::string, std::size_t> counts;
  Eigen::VectorXd rewards;
  bool filtered = false;
};

/// Extracts labels into `samples`, votes and assigns rewards.
VoteOutcome vote(std::vector<ResponseSample>& samples, ExtractionStrategy strategy);
VoteOutcome vote_labels(std::span<const std::string> labels);

/// Zeroes all rewards when the majority label is not numeric.
VoteOutcome apply_numeric_filter(VoteOutcome outcome);

}  // namespace ttrl
