#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace atelier {

enum class Source { USHMM, JOODS, NIOD, OTHER };

enum class LocationType { camp, ghetto, city, region, country, unknown };

std::string_view to_string(Source source);
std::string_view to_string(LocationType type);

// Exact canonical spelling only ("USHMM", "camp").
std::optional<Source> source_from_string(std::string_view s);
std::optional<LocationType> location_type_from_string(std::string_view s);

// Case-insensitive, accepts institution names and common abbreviations.
std::optional<Source> parse_source(std::string_view s);
std::optional<LocationType> parse_location_type(std::string_view s);

// Lower value = preferred when choosing among duplicates.
int source_priority(Source source) noexcept;

struct ArtworkRecord {
    std::string id;
    std::string title;
    std::string artist;
    std::optional<int> year_min;
    std::optional<int> year_max;
    std::string location_name;
    LocationType location_type = LocationType::unknown;
    std::optional<double> latitude;
    std::optional<double> longitude;
    Source source = Source::OTHER;
    std::string source_url;
    std::string copyright;
    std::string image_path;
    std::optional<std::uint64_t> phash;

    bool geocoded() const noexcept { return latitude.has_value() && longitude.has_value(); }

    bool operator==(const ArtworkRecord&) const = default;
};

struct Violation {
    std::string field;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

// Checks the per-record invariants (id, year order, coordinate ranges and
// pairing). File existence and id uniqueness are collection-level checks.
std::vector<Violation> validate_record(const ArtworkRecord& record);

// Normalized to image height (y) and width (x).
struct BoundingBox {
    double ymin = 0;
    double xmin = 0;
    double ymax = 1;
    double xmax = 1;

    bool valid() const noexcept;
    bool operator==(const BoundingBox&) const = default;
};

struct DetectionRecord {
    std::string image_id;
    std::string label;
    std::string raw_label;
    double confidence = 0;
    BoundingBox box;

    bool operator==(const DetectionRecord&) const = default;
};

struct DetectionFilterConfig {
    double min_confidence = 0.2;
    int max_per_image = 20;
    int max_raw_per_image = 100;
    // Labels dropped before ranking. Ships empty.
    std::set<std::string> label_blocklist;

    // Throws Error(invalid_config).
    void validate() const;
};

struct CollectionStats {
    std::size_t n_images = 0;
    std::size_t n_detections_retained = 0;
    double mean_detections_per_image = 0;
    std::size_t n_geocoded = 0;
};

}  // namespace atelier
