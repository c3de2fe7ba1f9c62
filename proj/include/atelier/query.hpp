#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atelier/error.hpp"
#include "atelier/model.hpp"

namespace atelier {

inline constexpr std::size_t kDefaultPageSize = 12;

// SplitMix64 (Steele, Lea, Flood 2014). The constants are part of the
// gallery contract; see docs/gallery-shuffle.md.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

struct YearSpan {
    int min = 0;
    int max = 0;
    bool operator==(const YearSpan&) const = default;
};

// Facets combine with AND; values within one facet combine with OR. An empty
// facet is unconstrained.
struct FilterSpec {
    std::set<std::string> artists;
    std::optional<YearSpan> year_range;
    std::set<std::string> locations;
    std::set<Source> sources;
    std::set<std::string> labels;

    bool unconstrained() const noexcept {
        return artists.empty() && !year_range && locations.empty() && sources.empty() && labels.empty();
    }
    bool operator==(const FilterSpec&) const = default;
};

struct BuildReport {
    std::vector<Issue> issues;
    std::size_t n_dangling = 0;
    std::size_t n_raw_detections = 0;
};

// Immutable after build. Records are held in ascending id order and every
// posting list is a sorted vector of record positions.
class CollectionIndex {
public:
    using Posting = std::vector<std::uint32_t>;

    CollectionIndex() = default;

    // Applies filter_detections, drops detections whose image_id is unknown
    // (reported), then builds the facet postings. Throws
    // Error(duplicate_id) or Error(invalid_config).
    static CollectionIndex build(std::vector<ArtworkRecord> records, std::span<const DetectionRecord> detections,
                                 const DetectionFilterConfig& config = {}, BuildReport* report = nullptr);

    std::span<const ArtworkRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    std::size_t n_detections() const noexcept { return detections_.size(); }

    const ArtworkRecord* find(std::string_view id) const;
    std::optional<std::uint32_t> position(std::string_view id) const;

    // Retained detections of one image, descending confidence.
    std::span<const DetectionRecord> detections_of(std::uint32_t position) const;
    std::span<const DetectionRecord> detections_of(std::string_view id) const;

    const std::map<std::string, Posting, std::less<>>& artist_postings() const noexcept { return by_artist_; }
    const std::map<std::string, Posting, std::less<>>& location_postings() const noexcept { return by_location_; }
    const std::map<Source, Posting>& source_postings() const noexcept { return by_source_; }
    const std::map<std::string, Posting, std::less<>>& label_postings() const noexcept { return by_label_; }

    // Positions of records matching spec, ascending.
    Posting match(const FilterSpec& spec) const;

private:
    std::vector<ArtworkRecord> records_;
    std::unordered_map<std::string, std::uint32_t> position_of_;
    std::vector<DetectionRecord> detections_;
    std::vector<std::size_t> detection_offsets_;  // size() + 1 entries
    std::map<std::string, Posting, std::less<>> by_artist_;
    std::map<std::string, Posting, std::less<>> by_location_;
    std::map<Source, Posting> by_source_;
    std::map<std::string, Posting, std::less<>> by_label_;
};

// Ids of matching images, ascending.
std::vector<std::string> apply_filter(const CollectionIndex& index, const FilterSpec& spec);

// Does a record's year range overlap the span? Records without any year
// never match a year constraint.
bool overlaps_years(const ArtworkRecord& record, const YearSpan& span) noexcept;

// Fisher-Yates over a copy of ids driven by SplitMix64(seed); returns the
// first min(page_size, ids.size()) entries.
std::vector<std::string> sample_gallery(std::span<const std::string> ids, std::uint64_t seed,
                                        std::size_t page_size = kDefaultPageSize);

}  // namespace atelier
