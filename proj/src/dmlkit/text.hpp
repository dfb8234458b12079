#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Byte-level string helpers. Only ASCII bytes are ever inspected or
// rewritten; multi-byte UTF-8 sequences pass through untouched.
namespace dmlkit::text {

bool is_space(char c) noexcept;
bool is_digit(char c) noexcept;
bool is_alpha(char c) noexcept;
bool is_alnum(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

/// Trims both ends and folds every internal run of ASCII whitespace into a
/// single space.
std::string collapse_whitespace(std::string_view s);

bool is_collapsed(std::string_view s) noexcept;

std::string to_lower_ascii(std::string_view s);

bool all_digits(std::string_view s) noexcept;

bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;

std::vector<std::string> split(std::string_view s, char delimiter);

std::string join(const std::vector<std::string>& parts, std::string_view separator);

/// Parses a non-negative decimal integer that fits in 64 bits.
std::optional<unsigned long long> parse_unsigned(std::string_view s) noexcept;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

bool is_absolute_http_url(std::string_view s);

bool is_valid_utf8(std::string_view s) noexcept;

}  // namespace dmlkit::text
