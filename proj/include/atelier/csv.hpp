#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atelier::csv {

// RFC-4180 style reader: comma separated, double-quote quoting with ""
// escapes, LF or CRLF record terminators. Blank lines are skipped. A UTF-8
// byte order mark at the start is ignored.
struct Row {
    std::size_t number = 0;  // 1-based record ordinal, header = 1
    std::vector<std::string> fields;
};

// Throws Error(malformed_csv) on an unterminated quoted field.
std::vector<Row> parse(std::string_view text);

// Quotes only when the field holds a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Appends the row and a trailing "\n".
void append_row(std::string& out, std::span<const std::string> fields);
void append_row(std::string& out, std::initializer_list<std::string_view> fields);

// Maps header names to column positions. The header must contain exactly
// the expected names, in any order.
class Header {
public:
    // Throws Error(missing_header) naming the first absent column, or
    // Error(unexpected_header) for unknown or repeated names.
    Header(const Row& header, std::span<const std::string_view> expected);

    const std::string& get(const Row& row, std::string_view column) const;
    std::size_t width() const noexcept { return width_; }

private:
    std::map<std::string, std::size_t, std::less<>> index_;
    std::size_t width_ = 0;
};

// Reads the document after validating it as UTF-8; throws Error(not_utf8).
std::vector<Row> parse_utf8(std::string_view content);

}  // namespace atelier::csv
