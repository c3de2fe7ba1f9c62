#pragma once

#include <optional>
#include <string>
#include <vector>

#include "atelier/model.hpp"
#include "atelier/query.hpp"

namespace atelier {

inline constexpr std::size_t kDefaultWordCloudSize = 50;

struct LabelFrequency {
    std::string label;
    std::size_t detection_count = 0;
    std::size_t image_count = 0;

    bool operator==(const LabelFrequency&) const = default;
};

struct LocationAggregate {
    std::string location_name;
    LocationType location_type = LocationType::unknown;
    double latitude = 0;
    double longitude = 0;
    std::size_t image_count = 0;

    bool operator==(const LocationAggregate&) const = default;
};

// Word-cloud rows over retained detections of matching images: detection
// count descending, then label ascending, truncated to top_n.
std::vector<LabelFrequency> label_frequencies(const CollectionIndex& index, const FilterSpec& filter,
                                              std::size_t top_n = kDefaultWordCloudSize);

// Map rows: one per location_name among matching geocoded images, image
// count descending then name ascending. Coordinates and type come from the
// lowest-id record at that location.
std::vector<LocationAggregate> location_aggregates(const CollectionIndex& index, const FilterSpec& filter);

CollectionStats collection_stats(const CollectionIndex& index);

struct FacetValue {
    std::string value;
    std::size_t count = 0;
};

// Distinct values per facet with image counts, for populating dropdowns.
struct FacetSummary {
    std::vector<FacetValue> artists;
    std::vector<FacetValue> locations;
    std::vector<FacetValue> location_types;
    std::vector<FacetValue> sources;
    std::vector<FacetValue> labels;
    std::optional<YearSpan> years;
};

FacetSummary facet_summary(const CollectionIndex& index);

}  // namespace atelier
