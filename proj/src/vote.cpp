#include "ttrl/vote.hpp"

#include "ttrl/errors.hpp"
#include "ttrl/numeric.hpp"

namespace ttrl {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_trailing_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

std::string last_token(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && is_space(text[end - 1])) --end;
  std::size_t begin = end;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  std::string_view token = text.substr(begin, end - begin);
  while (!token.empty() && is_trailing_punct(token.back())) token.remove_suffix(1);
  return std::string(token);
}

}  // namespace

std::string_view to_string(ExtractionStrategy s) {
  switch (s) {
    case ExtractionStrategy::last_token: return "last_token";
    case ExtractionStrategy::numeric_last: return "numeric_last";
    case ExtractionStrategy::numeric_empty_fallback: return "numeric_empty_fallback";
  }
  return "";
}

std::optional<ExtractionStrategy> parse_extraction(std::string_view s) {
  for (auto v : {ExtractionStrategy::last_token, ExtractionStrategy::numeric_last,
                 ExtractionStrategy::numeric_empty_fallback})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::string extract_label(std::string_view text, ExtractionStrategy strategy) {
  switch (strategy) {
    case ExtractionStrategy::last_token:
      return last_token(text);
    case ExtractionStrategy::numeric_last:
      if (auto n = last_numeric_substring(text)) return std::string(*n);
      return last_token(text);
    case ExtractionStrategy::numeric_empty_fallback:
      if (auto n = last_numeric_substring(text)) return std::string(*n);
      return {};
  }
  return {};
}

MajorityResult majority_vote(std::span<const std::string> labels) {
  if (labels.empty()) throw VoteError("majority_vote: no labels");
  MajorityResult result;
  for (const auto& l : labels) ++result.counts[l];
  // std::map iterates in byte order, so the first maximum is the tie winner.
  std::size_t best = 0;
  for (const auto& [label, count] : result.counts) {
    if (count > best) {
      best = count;
      result.label = label;
    }
  }
  return result;
}

Eigen::VectorXd assign_rewards(std::span<const std::string> labels,
                               std::string_view majority_label) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t k = 0; k < labels.size(); ++k)
    r[static_cast<Eigen::Index>(k)] = labels[k] == majority_label ? 1.0 : 0.0;
  if (!labels.empty() && r.sum() < 1.0)
    throw VoteError("majority label \"" + std::string(majority_label) +
                    "\" does not occur among the labels");
  return r;
}

VoteOutcome vote_labels(std::span<const std::string> labels) {
  auto majority = majority_vote(labels);
  VoteOutcome out;
  out.rewards = assign_rewards(labels, majority.label);
  out.majority_label = std::move(majority.label);
  out.counts = std::move(majority.counts);
  return out;
}

VoteOutcome vote(std::vector<ResponseSample>& samples, ExtractionStrategy strategy) {
  std::vector<std::string> labels;
  labels.reserve(samples.size());
  for (auto& s : samples) {
    s.label = extract_label(s.text, strategy);
    labels.push_back(s.label);
  }
  return vote_labels(labels);
}

VoteOutcome apply_numeric_filter(VoteOutcome outcome) {
  if (!is_numeric(outcome.majority_label)) {
    outcome.rewards.setZero();
    outcome.filtered = true;
  }
  return outcome;
}

}  // namespace ttrl
