#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ttrl {

// Numeric label grammar: optional sign, one or more digits, optional
// fractional part ('.' followed by one or more digits). No exponents.

/// True iff the whole string matches the grammar.
bool is_numeric(std::string_view s);

/// Value of a string matching the grammar.
std::optional<double> parse_numeric(std::string_view s);

/// Last maximal grammar match anywhere in `text`.
std::optional<std::string_view> last_numeric_substring(std::string_view text);

/// `answer + offset`, keeping integer answers integral and decimal answers at
/// their original number of fractional digits.
std::string offset_answer(std::string_view answer, long long offset);

/// Exact numeric equality of two grammar strings ("7" == "7.0"); false if
/// either side is not numeric.
bool numeric_equal(std::string_view a, std::string_view b);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Fixed-point with `decimals` fractional digits.
std::string format_fixed(double v, int decimals);

}  // namespace ttrl
