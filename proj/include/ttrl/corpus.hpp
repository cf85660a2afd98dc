#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttrl/archetype.hpp"

namespace ttrl {

/// One test-time input.
struct PromptRecord {
  std::string id;
  std::string text;
  Archetype archetype = Archetype::reasoning;
  std::optional<std::string> answer;
  std::vector<std::string> source_ids;

  bool operator==(const PromptRecord&) const = default;
};

/// Throws CorpusError if the record breaks an archetype invariant.
void validate_record(const PromptRecord& record);

/// Parses one corpus line. `fallback` applies when the line carries no
/// archetype of its own. `line_number` only labels errors.
PromptRecord parse_record(std::string_view line, Archetype fallback,
                          std::size_t line_number = 0);

/// Canonical single-line encoding (keys in fixed order, no trailing newline).
std::string serialize_record(const PromptRecord& record);

std::vector<PromptRecord> read_corpus(std::istream& in, Archetype expected);
std::vector<PromptRecord> load_corpus(const std::filesystem::path& path,
                                      Archetype expected);

void write_corpus(std::ostream& out, const std::vector<PromptRecord>& records);
void save_corpus(const std::filesystem::path& path,
                 const std::vector<PromptRecord>& records);

/// Fixed prompt wrapper pairing a jailbreak request with a reasoning question.
std::string harminject_text(std::string_view jailbreak, std::string_view reasoning);

/// Id of the composed record; injective in the (jailbreak, reasoning) id pair.
std::string harminject_id(std::string_view jailbreak_id, std::string_view reasoning_id);

PromptRecord compose_harminject(const PromptRecord& jailbreak,
                                const PromptRecord& reasoning);

/// Seeded pairing: both pools are shuffled, then the k-th jailbreak pairs
/// with the k-th reasoning record, up to the smaller pool size.
std::vector<PromptRecord> compose_harminject_pairs(
    std::vector<PromptRecord> jailbreaks, std::vector<PromptRecord> reasoning,
    std::uint64_t seed);

/// round(ratio * n), halves away from zero.
std::size_t injected_count(std::size_t reasoning_count, double ratio);

/// Immutable mixed prompt stream. Iteration wraps around indefinitely.
class Stream {
 public:
  Stream(std::vector<PromptRecord> records, std::uint64_t seed,
         double injection_ratio, std::size_t injected)
      : records_(std::move(records)),
        seed_(seed),
        injection_ratio_(injection_ratio),
        injected_(injected) {}

  const std::vector<PromptRecord>& records() const noexcept { return records_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double injection_ratio() const noexcept { return injection_ratio_; }
  std::size_t injected() const noexcept { return injected_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Record at absolute position `i` of the unbounded multi-epoch sequence.
  const PromptRecord& at(std::size_t i) const { return records_[i % records_.size()]; }

 private:
  std::vector<PromptRecord> records_;
  std::uint64_t seed_;
  double injection_ratio_;
  std::size_t injected_;
};

/// Per-consumer position into a shared Stream.
class StreamCursor {
 public:
  explicit StreamCursor(const Stream& stream) : stream_(&stream) {}

  const PromptRecord& next() { return stream_->at(position_++); }
  std::vector<PromptRecord> take(std::size_t n);
  std::size_t position() const noexcept { return position_; }

 private:
  const Stream* stream_;
  std::size_t position_ = 0;
};

/// All reasoning records plus round(ratio * |reasoning|) injected records
/// drawn without replacement, shuffled together. Pure in (inputs, seed).
Stream mix_stream(const std::vector<PromptRecord>& reasoning,
                  const std::vector<PromptRecord>& injected, double injection_ratio,
                  std::uint64_t seed);

}  // namespace ttrl
