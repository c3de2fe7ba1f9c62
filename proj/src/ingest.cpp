#include "atelier/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_set>

#include "atelier/csv.hpp"
#include "atelier/text.hpp"

namespace atelier {

namespace fs = std::filesystem;

namespace {

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }
std::string opt_double(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

// Parses one metadata row into a record, appending issues for each bad cell.
std::optional<ArtworkRecord> record_from_row(const csv::Header& h, const csv::Row& row, std::vector<Issue>& issues) {
    const std::size_t before = issues.size();
    auto bad = [&](std::string_view field, std::string message) {
        issues.push_back({row.number, std::string(field), std::move(message)});
    };
    ArtworkRecord r;
    r.id = h.get(row, "id");
    r.title = h.get(row, "title");
    r.artist = h.get(row, "artist");
    r.location_name = h.get(row, "location_name");
    r.source_url = h.get(row, "source_url");
    r.copyright = h.get(row, "copyright");
    r.image_path = h.get(row, "image_path");

    auto int_cell = [&](std::string_view col) -> std::optional<int> {
        const std::string& v = h.get(row, col);
        if (v.empty()) return std::nullopt;
        auto parsed = text::parse_int(v);
        if (!parsed) bad(col, "not an integer: '" + v + "'");
        return parsed;
    };
    auto double_cell = [&](std::string_view col) -> std::optional<double> {
        const std::string& v = h.get(row, col);
        if (v.empty()) return std::nullopt;
        auto parsed = text::parse_double(v);
        if (!parsed) bad(col, "not a decimal number: '" + v + "'");
        return parsed;
    };
    r.year_min = int_cell("year_min");
    r.year_max = int_cell("year_max");
    r.latitude = double_cell("latitude");
    r.longitude = double_cell("longitude");

    if (auto t = location_type_from_string(h.get(row, "location_type"))) {
        r.location_type = *t;
    } else {
        bad("location_type", "unknown value '" + h.get(row, "location_type") + "'");
    }
    if (auto s = source_from_string(h.get(row, "source"))) {
        r.source = *s;
    } else {
        bad("source", "unknown value '" + h.get(row, "source") + "'");
    }
    if (const std::string& ph = h.get(row, "phash"); !ph.empty()) {
        r.phash = text::parse_hex64(ph);
        if (!r.phash) bad("phash", "expected 16 lowercase hex digits: '" + ph + "'");
    }
    for (const auto& v : validate_record(r)) bad(v.field, v.rule);
    if (issues.size() != before) return std::nullopt;
    return r;
}

std::string strip_year_prefix(std::string s) {
    static const std::vector<std::string> prefixes = {"approximately ", "approx. ", "approx ", "circa ", "omstreeks ",
                                                      "ca. ",          "ca.",      "ca ",     "c. ",    "c.",
                                                      "around "};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& p : prefixes) {
            if (s.starts_with(p)) {
                s = text::trim(s.substr(p.size()));
                changed = true;
            }
        }
    }
    return s;
}

}  // namespace

MetadataParseResult parse_metadata_csv(std::string_view content) {
    const auto rows = csv::parse_utf8(content);
    if (rows.empty()) throw Error(ErrorCode::missing_header, "missing column: id (empty document)");
    const csv::Header header(rows.front(), kMetadataColumns);

    MetadataParseResult result;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        ++result.report.n_rows_read;
        if (row.fields.size() != header.width()) {
            result.report.issues.push_back({row.number, "",
                                            "expected " + std::to_string(header.width()) + " fields, found " +
                                                std::to_string(row.fields.size())});
            continue;
        }
        auto record = record_from_row(header, row, result.report.issues);
        if (!record) continue;
        if (!seen.insert(record->id).second) {
            result.report.issues.push_back({row.number, "id", "duplicate id '" + record->id + "'"});
            continue;
        }
        result.records.push_back(std::move(*record));
    }
    result.report.n_records_ok = result.records.size();
    return result;
}

std::string serialize_metadata_csv(std::span<const ArtworkRecord> records) {
    std::string out;
    std::vector<std::string> cells(kMetadataColumns.begin(), kMetadataColumns.end());
    csv::append_row(out, cells);
    for (const auto& r : records) {
        if (auto v = validate_record(r); !v.empty()) {
            throw Error(ErrorCode::invalid_record, "record '" + r.id + "': " + v.front().field + ": " + v.front().rule);
        }
        cells = {r.id,
                 r.title,
                 r.artist,
                 opt_int(r.year_min),
                 opt_int(r.year_max),
                 r.location_name,
                 std::string(to_string(r.location_type)),
                 opt_double(r.latitude),
                 opt_double(r.longitude),
                 std::string(to_string(r.source)),
                 r.source_url,
                 r.copyright,
                 r.image_path,
                 r.phash ? text::hex64(*r.phash) : std::string()};
        csv::append_row(out, cells);
    }
    return out;
}

std::optional<YearRange> parse_year(std::string_view expression) {
    std::string s = text::to_lower(text::collapse_whitespace(expression));
    for (std::string_view dash : {"\xE2\x80\x93", "\xE2\x80\x94"}) {
        for (auto pos = s.find(dash); pos != std::string::npos; pos = s.find(dash)) s.replace(pos, dash.size(), "-");
    }
    s = strip_year_prefix(s);
    if (s.empty()) return std::nullopt;

    static const std::regex single(R"((\d{4}))");
    static const std::regex span(R"((\d{4}) ?[-/] ?(?:ca\.? ?)?(\d{4}))");
    static const std::regex short_span(R"((\d{4}) ?- ?(\d{2}))");
    static const std::regex decade(R"((\d{3})0'?s)");

    std::smatch m;
    if (std::regex_match(s, m, single)) {
        const int y = std::stoi(m[1]);
        return YearRange{y, y};
    }
    if (std::regex_match(s, m, span)) {
        const int a = std::stoi(m[1]), b = std::stoi(m[2]);
        if (a > b) return std::nullopt;
        return YearRange{a, b};
    }
    if (std::regex_match(s, m, short_span)) {
        const int a = std::stoi(m[1]);
        const int b = a / 100 * 100 + std::stoi(m[2]);
        if (b < a) return std::nullopt;
        return YearRange{a, b};
    }
    if (std::regex_match(s, m, decade)) {
        const int a = std::stoi(m[1]) * 10;
        return YearRange{a, a + 9};
    }
    return std::nullopt;
}

std::string format_year(std::optional<int> year_min, std::optional<int> year_max) {
    if (!year_min && !year_max) return {};
    if (!year_min || !year_max || *year_min == *year_max) return std::to_string(year_min ? *year_min : *year_max);
    return std::to_string(*year_min) + "-" + std::to_string(*year_max);
}

NormalizeResult normalize_record(const ArtworkDraft& d) {
    NormalizeResult out;
    auto& r = out.record;
    auto issue = [&](std::string field, std::string message) { out.issues.push_back({0, std::move(field), std::move(message)}); };

    r.id = text::trim(d.id);
    r.title = text::collapse_whitespace(d.title);
    r.artist = text::collapse_whitespace(d.artist);
    r.location_name = text::collapse_whitespace(d.location_name);
    r.source_url = text::trim(d.source_url);
    r.copyright = text::collapse_whitespace(d.copyright);
    r.image_path = text::trim(d.image_path);

    if (const std::string year = text::collapse_whitespace(d.year); !year.empty()) {
        if (auto range = parse_year(year)) {
            r.year_min = range->min;
            r.year_max = range->max;
        } else {
            issue("year", "unparseable year '" + year + "'");
        }
    }

    if (const std::string lt = text::trim(d.location_type); !lt.empty()) {
        if (auto t = parse_location_type(lt)) {
            r.location_type = *t;
        } else {
            issue("location_type", "unknown location type '" + lt + "'");
        }
    }

    if (const std::string src = text::collapse_whitespace(d.source); !src.empty()) {
        if (auto s = parse_source(src)) {
            r.source = *s;
        } else {
            issue("source", "unknown source '" + src + "', using OTHER");
        }
    }

    auto coordinate = [&](const std::string& raw, std::string_view field) -> std::optional<double> {
        const std::string v = text::trim(raw);
        if (v.empty()) return std::nullopt;
        auto parsed = text::parse_double(v);
        if (!parsed) issue(std::string(field), "not a decimal number: '" + v + "'");
        return parsed;
    };
    r.latitude = coordinate(d.latitude, "latitude");
    r.longitude = coordinate(d.longitude, "longitude");

    if (const std::string ph = text::to_lower(text::trim(d.phash)); !ph.empty()) {
        r.phash = text::parse_hex64(ph);
        if (!r.phash) issue("phash", "expected 16 hex digits: '" + ph + "'");
    }
    return out;
}

ArtworkDraft to_draft(const ArtworkRecord& r) {
    ArtworkDraft d;
    d.id = r.id;
    d.title = r.title;
    d.artist = r.artist;
    d.year = format_year(r.year_min, r.year_max);
    d.location_name = r.location_name;
    d.location_type = r.location_type == LocationType::unknown ? "" : std::string(to_string(r.location_type));
    d.latitude = r.latitude ? text::format_double(*r.latitude) : "";
    d.longitude = r.longitude ? text::format_double(*r.longitude) : "";
    d.source = std::string(to_string(r.source));
    d.source_url = r.source_url;
    d.copyright = r.copyright;
    d.image_path = r.image_path;
    d.phash = r.phash ? text::hex64(*r.phash) : "";
    return d;
}

RawParseResult parse_raw_csv(std::string_view content) {
    const auto rows = csv::parse_utf8(content);
    if (rows.empty()) throw Error(ErrorCode::missing_header, "missing column: id (empty document)");
    const csv::Header h(rows.front(), kRawColumns);
    RawParseResult out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != h.width()) {
            out.issues.push_back({row.number, "",
                                  "expected " + std::to_string(h.width()) + " fields, found " +
                                      std::to_string(row.fields.size())});
            continue;
        }
        ArtworkDraft d;
        d.id = h.get(row, "id");
        d.title = h.get(row, "title");
        d.artist = h.get(row, "artist");
        d.year = h.get(row, "year");
        d.location_name = h.get(row, "location_name");
        d.location_type = h.get(row, "location_type");
        d.source = h.get(row, "source");
        d.source_url = h.get(row, "source_url");
        d.copyright = h.get(row, "copyright");
        d.image_path = h.get(row, "image_path");
        out.drafts.push_back(std::move(d));
        out.rows.push_back(row.number);
    }
    return out;
}

std::string serialize_raw_csv(std::span<const ArtworkDraft> drafts) {
    std::string out;
    std::vector<std::string> cells(kRawColumns.begin(), kRawColumns.end());
    csv::append_row(out, cells);
    for (const auto& d : drafts) {
        cells = {d.id,     d.title,      d.artist,    d.year,      d.location_name, d.location_type,
                 d.source, d.source_url, d.copyright, d.image_path};
        csv::append_row(out, cells);
    }
    return out;
}

MatchReport match_images(std::span<const ArtworkRecord> records, std::span<const std::string> files) {
    const std::set<std::string, std::less<>> available(files.begin(), files.end());
    std::set<std::string, std::less<>> referenced;
    MatchReport out;
    for (const auto& r : records) {
        if (!r.image_path.empty() && available.contains(r.image_path)) {
            out.matched_records.push_back(r.id);
            referenced.insert(r.image_path);
        } else {
            out.unmatched_records.push_back(r.id);
        }
    }
    for (const auto& f : available) {
        if (!referenced.contains(f)) out.unmatched_files.push_back(f);
    }
    return out;
}

std::vector<std::string> list_image_files(const fs::path& dir) {
    static const std::set<std::string> extensions = {".jpg", ".jpeg", ".png", ".pgm", ".ppm"};
    std::vector<std::string> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::io_error, "not a directory: " + dir.string());
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (!extensions.contains(text::to_lower(entry.path().extension().string()))) continue;
        out.push_back(fs::relative(entry.path(), dir).generic_string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace atelier
