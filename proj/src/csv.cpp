#include "atelier/csv.hpp"

#include "atelier/error.hpp"
#include "atelier/text.hpp"

namespace atelier::csv {

std::vector<Row> parse(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<Row> rows;
    Row current;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t ordinal = 0;

    auto end_record = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty() && !field_was_quoted;
        if (!blank) {
            current.number = ++ordinal;
            rows.push_back(std::move(current));
        }
        current = Row{};
        field_was_quoted = false;
    };

    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                // A quote opens a quoted section anywhere; stray quotes inside
                // unquoted text are tolerated this way.
                in_quotes = true;
                field_was_quoted = true;
                break;
            case ',':
                current.fields.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                if (i + 1 < n && text[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                field += c;
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::malformed_csv,
                    "unterminated quoted field in row " + std::to_string(ordinal + 1));
    }
    if (!field.empty() || !current.fields.empty() || field_was_quoted) end_record();
    return rows;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void append_row(std::string& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += escape(fields[i]);
    }
    out += '\n';
}

void append_row(std::string& out, std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
        if (!first) out += ',';
        first = false;
        out += escape(f);
    }
    out += '\n';
}

Header::Header(const Row& header, std::span<const std::string_view> expected) : width_(header.fields.size()) {
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        if (!index_.emplace(header.fields[i], i).second) {
            throw Error(ErrorCode::unexpected_header, "repeated column: " + header.fields[i]);
        }
    }
    // An absent required column outranks an extra one: a renamed column is
    // reported by its expected name.
    for (auto e : expected) {
        if (!index_.contains(e)) throw Error(ErrorCode::missing_header, "missing column: " + std::string(e));
    }
    for (const auto& name : header.fields) {
        bool known = false;
        for (auto e : expected) known = known || e == name;
        if (!known) throw Error(ErrorCode::unexpected_header, "unexpected column: " + name);
    }
}

const std::string& Header::get(const Row& row, std::string_view column) const {
    return row.fields.at(index_.find(column)->second);
}

std::vector<Row> parse_utf8(std::string_view content) {
    if (!text::is_valid_utf8(content)) throw Error(ErrorCode::not_utf8, "content is not valid UTF-8");
    return parse(content);
}

}  // namespace atelier::csv
