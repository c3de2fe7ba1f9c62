#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atelier/image.hpp"
#include "atelier/model.hpp"

namespace atelier {

inline constexpr int kDefaultDedupThreshold = 10;

// Difference hash. The raster is box-filtered to 9 columns x 8 rows by exact
// area weighting (integer arithmetic, so every cell carries the same total
// weight and sums compare directly). Bit (row * 8 + col), counted from the
// least significant bit, is set iff cell(col, row) > cell(col + 1, row).
// Throws Error(undecodable_image) for an empty raster.
std::uint64_t perceptual_hash(const GrayImage& image);

int hamming_distance(std::uint64_t a, std::uint64_t b) noexcept;

struct HashEntry {
    std::string id;
    std::uint64_t phash = 0;
};

struct DuplicateCluster {
    std::vector<std::string> member_ids;  // ascending
    std::optional<std::string> survivor_id;

    bool operator==(const DuplicateCluster&) const = default;
};

// Connected components of the graph linking entries within threshold bits,
// singletons included, ordered by smallest member id. Throws
// Error(duplicate_id) if an id repeats.
std::vector<DuplicateCluster> find_duplicates(std::span<const HashEntry> entries, int threshold = kDefaultDedupThreshold);

// Count of populated descriptive fields (id, source and phash excluded).
std::size_t filled_field_count(const ArtworkRecord& record);

// Survivor = most filled fields, then source priority, then smallest id.
// Throws Error(unknown_member_id).
std::vector<DuplicateCluster> select_survivors(std::vector<DuplicateCluster> clusters,
                                               std::span<const ArtworkRecord> records);

struct DedupReportRow {
    std::string survivor_id;
    std::string removed_id;
    int distance_bits = 0;
};

std::vector<DedupReportRow> dedup_report(std::span<const DuplicateCluster> clusters, std::span<const HashEntry> entries);

// survivor_id,removed_id,distance_bits
std::string serialize_dedup_report(std::span<const DedupReportRow> rows);

}  // namespace atelier
