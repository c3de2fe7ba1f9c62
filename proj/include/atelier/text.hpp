#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace atelier::text {

bool is_space(char c) noexcept;

std::string trim(std::string_view s);

// Trims and replaces every run of ASCII whitespace with one space.
std::string collapse_whitespace(std::string_view s);

std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b) noexcept;

bool is_valid_utf8(std::string_view s) noexcept;

void append_utf8(std::string& out, std::uint32_t code_point);

// 64-bit FNV-1a over the raw bytes.
std::uint64_t fnv1a64(std::string_view s) noexcept;

// 16 lowercase hex digits, zero padded.
std::string hex64(std::uint64_t value);

// Accepts exactly 16 lowercase hex digits.
std::optional<std::uint64_t> parse_hex64(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Whole-string decimal parse; rejects trailing garbage, inf and nan.
std::optional<double> parse_double(std::string_view s);

std::optional<int> parse_int(std::string_view s);

}  // namespace atelier::text
