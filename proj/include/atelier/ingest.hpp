#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atelier/error.hpp"
#include "atelier/model.hpp"

namespace atelier {

inline constexpr std::array<std::string_view, 14> kMetadataColumns = {
    "id",       "title",     "artist", "year_min",   "year_max",  "location_name", "location_type",
    "latitude", "longitude", "source", "source_url", "copyright", "image_path",    "phash"};

// Column set of the harvest output (raw.csv): everything is still text.
inline constexpr std::array<std::string_view, 10> kRawColumns = {
    "id", "title", "artist", "year", "location_name", "location_type", "source", "source_url", "copyright",
    "image_path"};

struct IngestReport {
    std::size_t n_rows_read = 0;
    std::size_t n_records_ok = 0;
    std::vector<Issue> issues;
    std::vector<std::string> unmatched_records;
    std::vector<std::string> unmatched_files;
};

struct MetadataParseResult {
    std::vector<ArtworkRecord> records;
    IngestReport report;
};

// Strict reader for the metadata CSV. Invalid rows are skipped and reported;
// header problems and invalid UTF-8 throw.
MetadataParseResult parse_metadata_csv(std::string_view content);

// Throws Error(invalid_record) if any record fails validate_record.
std::string serialize_metadata_csv(std::span<const ArtworkRecord> records);

// A record as scraped: every field is unparsed text.
struct ArtworkDraft {
    std::string id;
    std::string title;
    std::string artist;
    std::string year;
    std::string location_name;
    std::string location_type;
    std::string latitude;
    std::string longitude;
    std::string source;
    std::string source_url;
    std::string copyright;
    std::string image_path;
    std::string phash;

    bool operator==(const ArtworkDraft&) const = default;
};

struct YearRange {
    int min = 0;
    int max = 0;
    bool operator==(const YearRange&) const = default;
};

inline constexpr int kYearRuleTableVersion = 1;

// Year expression rule table (docs/year-rules.md). Returns nullopt for empty
// or unparseable input.
std::optional<YearRange> parse_year(std::string_view expression);

// Inverse of parse_year for display and round trips: "1945" or "1943-1944".
std::string format_year(std::optional<int> year_min, std::optional<int> year_max);

struct NormalizeResult {
    ArtworkRecord record;
    std::vector<Issue> issues;  // row left at 0
};

NormalizeResult normalize_record(const ArtworkDraft& draft);

// Canonical text form of a record; normalize_record(to_draft(r)).record == r
// for every normalized r.
ArtworkDraft to_draft(const ArtworkRecord& record);

struct RawParseResult {
    std::vector<ArtworkDraft> drafts;
    std::vector<std::size_t> rows;  // CSV row of each draft
    std::vector<Issue> issues;
};

RawParseResult parse_raw_csv(std::string_view content);
std::string serialize_raw_csv(std::span<const ArtworkDraft> drafts);

struct MatchReport {
    std::vector<std::string> matched_records;
    std::vector<std::string> unmatched_records;
    std::vector<std::string> unmatched_files;
};

// Exact, case-sensitive comparison of image_path against the file list.
MatchReport match_images(std::span<const ArtworkRecord> records, std::span<const std::string> files);

// Image files below dir as '/'-separated relative paths, sorted.
std::vector<std::string> list_image_files(const std::filesystem::path& dir);

// Whole-file read/write helpers; throw Error(io_error).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace atelier
