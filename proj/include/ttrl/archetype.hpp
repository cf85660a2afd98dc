#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ttrl {

enum class Archetype { reasoning, harmful, benign_instruction, harminject };

inline constexpr std::array<Archetype, 4> kAllArchetypes = {
    Archetype::reasoning, Archetype::harmful, Archetype::benign_instruction,
    Archetype::harminject};

constexpr std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::reasoning: return "reasoning";
    case Archetype::harmful: return "harmful";
    case Archetype::benign_instruction: return "benign_instruction";
    case Archetype::harminject: return "harminject";
  }
  return "";
}

inline std::optional<Archetype> parse_archetype(std::string_view s) {
  for (auto a : kAllArchetypes)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

/// Archetypes whose records must carry a numeric ground-truth answer.
constexpr bool requires_answer(Archetype a) {
  return a == Archetype::reasoning || a == Archetype::harminject;
}

}  // namespace ttrl
