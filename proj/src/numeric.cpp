#include "ttrl/numeric.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace ttrl {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of the grammar match starting at `pos`, 0 if none.
std::size_t match_at(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  const std::size_t digits_begin = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == digits_begin) return 0;
  if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i;
  }
  return i - pos;
}

}  // namespace

bool is_numeric(std::string_view s) {
  return !s.empty() && match_at(s, 0) == s.size();
}

std::optional<double> parse_numeric(std::string_view s) {
  if (!is_numeric(s)) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<std::string_view> last_numeric_substring(std::string_view text) {
  std::optional<std::string_view> last;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t n = match_at(text, i);
    if (n > 0) {
      last = text.substr(i, n);
      i += n;
    } else {
      ++i;
    }
  }
  return last;
}

std::string offset_answer(std::string_view answer, long long offset) {
  if (!is_numeric(answer))
    throw std::invalid_argument("answer is not numeric: " + std::string(answer));
  const auto dot = answer.find('.');
  if (dot == std::string_view::npos) {
    std::string_view digits = answer;
    if (digits.front() == '+') digits.remove_prefix(1);
    long long value = 0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec == std::errc{} && ptr == digits.data() + digits.size())
      return std::to_string(value + offset);
  }
  const int decimals =
      dot == std::string_view::npos ? 0 : static_cast<int>(answer.size() - dot - 1);
  return format_fixed(*parse_numeric(answer) + static_cast<double>(offset), decimals);
}

bool numeric_equal(std::string_view a, std::string_view b) {
  const auto x = parse_numeric(a);
  const auto y = parse_numeric(b);
  return x && y && *x == *y;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double v, int decimals) {
  std::array<char, 512> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, decimals);
  return std::string(buf.data(), ptr);
}

}  // namespace ttrl
