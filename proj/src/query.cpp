#include "atelier/query.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

#include "atelier/detections.hpp"

namespace atelier {

namespace {

using Posting = CollectionIndex::Posting;

Posting unite(const Posting& a, const Posting& b) {
    Posting out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Posting intersect(const Posting& a, const Posting& b) {
    Posting out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <typename Map, typename Values>
Posting union_of(const Map& postings, const Values& values) {
    Posting out;
    for (const auto& v : values) {
        if (auto it = postings.find(v); it != postings.end()) out = unite(out, it->second);
    }
    return out;
}

}  // namespace

bool overlaps_years(const ArtworkRecord& r, const YearSpan& span) noexcept {
    if (!r.year_min && !r.year_max) return false;
    const int lo = r.year_min ? *r.year_min : *r.year_max;
    const int hi = r.year_max ? *r.year_max : *r.year_min;
    return lo <= span.max && span.min <= hi;
}

CollectionIndex CollectionIndex::build(std::vector<ArtworkRecord> records, std::span<const DetectionRecord> detections,
                                       const DetectionFilterConfig& config, BuildReport* report) {
    config.validate();
    BuildReport local;
    BuildReport& rep = report ? *report : local;
    rep.n_raw_detections = detections.size();

    CollectionIndex index;
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].id == records[i - 1].id) {
            throw Error(ErrorCode::duplicate_id, "duplicate record id '" + records[i].id + "'");
        }
    }
    index.records_ = std::move(records);
    index.position_of_.reserve(index.records_.size());
    for (std::uint32_t i = 0; i < index.records_.size(); ++i) index.position_of_.emplace(index.records_[i].id, i);

    std::vector<DetectionRecord> known;
    known.reserve(detections.size());
    std::unordered_map<std::string_view, std::size_t> raw_per_image;
    for (const auto& d : detections) {
        if (!index.position_of_.contains(d.image_id)) {
            ++rep.n_dangling;
            rep.issues.push_back({0, "image_id", "detection references unknown image '" + d.image_id + "'"});
            continue;
        }
        ++raw_per_image[d.image_id];
        known.push_back(d);
    }
    for (const auto& [image, count] : raw_per_image) {
        if (count > static_cast<std::size_t>(config.max_raw_per_image)) {
            rep.issues.push_back({0, "image_id",
                                  "image '" + std::string(image) + "' has " + std::to_string(count) +
                                      " raw detections, above the detector cap of " +
                                      std::to_string(config.max_raw_per_image)});
        }
    }

    auto retained = filter_detections(known, config);
    // filter_detections groups by first appearance; regroup by record position.
    std::stable_sort(retained.begin(), retained.end(), [&](const auto& a, const auto& b) {
        return index.position_of_.at(a.image_id) < index.position_of_.at(b.image_id);
    });
    index.detections_ = std::move(retained);

    const std::size_t n = index.records_.size();
    index.detection_offsets_.assign(n + 1, 0);
    for (const auto& d : index.detections_) ++index.detection_offsets_[index.position_of_.at(d.image_id) + 1];
    std::partial_sum(index.detection_offsets_.begin(), index.detection_offsets_.end(),
                     index.detection_offsets_.begin());

    for (std::uint32_t pos = 0; pos < n; ++pos) {
        const auto& r = index.records_[pos];
        index.by_artist_[r.artist].push_back(pos);
        index.by_location_[r.location_name].push_back(pos);
        index.by_source_[r.source].push_back(pos);
        for (const auto& d : index.detections_of(pos)) {
            auto& posting = index.by_label_[d.label];
            if (posting.empty() || posting.back() != pos) posting.push_back(pos);
        }
    }
    return index;
}

const ArtworkRecord* CollectionIndex::find(std::string_view id) const {
    auto pos = position(id);
    return pos ? &records_[*pos] : nullptr;
}

std::optional<std::uint32_t> CollectionIndex::position(std::string_view id) const {
    if (auto it = position_of_.find(std::string(id)); it != position_of_.end()) return it->second;
    return std::nullopt;
}

std::span<const DetectionRecord> CollectionIndex::detections_of(std::uint32_t position) const {
    if (position >= records_.size()) return {};
    const auto begin = detection_offsets_[position];
    const auto end = detection_offsets_[position + 1];
    return std::span<const DetectionRecord>(detections_).subspan(begin, end - begin);
}

std::span<const DetectionRecord> CollectionIndex::detections_of(std::string_view id) const {
    auto pos = position(id);
    return pos ? detections_of(*pos) : std::span<const DetectionRecord>{};
}

CollectionIndex::Posting CollectionIndex::match(const FilterSpec& spec) const {
    std::optional<Posting> candidates;
    auto narrow = [&](Posting facet) {
        candidates = candidates ? intersect(*candidates, facet) : std::move(facet);
    };
    if (!spec.artists.empty()) narrow(union_of(by_artist_, spec.artists));
    if (!spec.locations.empty()) narrow(union_of(by_location_, spec.locations));
    if (!spec.sources.empty()) narrow(union_of(by_source_, spec.sources));
    if (!spec.labels.empty()) narrow(union_of(by_label_, spec.labels));

    if (!candidates) {
        candidates.emplace(records_.size());
        std::iota(candidates->begin(), candidates->end(), 0u);
    }
    if (spec.year_range) {
        std::erase_if(*candidates, [&](std::uint32_t pos) { return !overlaps_years(records_[pos], *spec.year_range); });
    }
    return std::move(*candidates);
}

std::vector<std::string> apply_filter(const CollectionIndex& index, const FilterSpec& spec) {
    std::vector<std::string> ids;
    const auto records = index.records();
    for (auto pos : index.match(spec)) ids.push_back(records[pos].id);
    return ids;
}

std::vector<std::string> sample_gallery(std::span<const std::string> ids, std::uint64_t seed, std::size_t page_size) {
    std::vector<std::string> items(ids.begin(), ids.end());
    SplitMix64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next() % i);
        std::swap(items[i - 1], items[j]);
    }
    if (items.size() > page_size) items.resize(page_size);
    return items;
}

}  // namespace atelier
