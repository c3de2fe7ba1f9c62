#include "atelier/analytics.hpp"

#include <algorithm>
#include <map>
#include <type_traits>

namespace atelier {

std::vector<LabelFrequency> label_frequencies(const CollectionIndex& index, const FilterSpec& filter,
                                              std::size_t top_n) {
    std::map<std::string_view, LabelFrequency> by_label;
    for (auto pos : index.match(filter)) {
        auto detections = index.detections_of(pos);
        // Count each label once per image for image_count.
        std::vector<std::string_view> seen;
        for (const auto& d : detections) {
            auto& row = by_label[d.label];
            row.label = d.label;
            ++row.detection_count;
            if (std::find(seen.begin(), seen.end(), d.label) == seen.end()) {
                seen.push_back(d.label);
                ++row.image_count;
            }
        }
    }
    std::vector<LabelFrequency> out;
    out.reserve(by_label.size());
    for (auto& [_, row] : by_label) out.push_back(std::move(row));
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.detection_count > b.detection_count; });
    if (out.size() > top_n) out.resize(top_n);
    return out;
}

std::vector<LocationAggregate> location_aggregates(const CollectionIndex& index, const FilterSpec& filter) {
    std::map<std::string_view, LocationAggregate> by_name;
    const auto records = index.records();
    for (auto pos : index.match(filter)) {
        const auto& r = records[pos];
        if (!r.geocoded()) continue;
        auto [it, inserted] = by_name.try_emplace(r.location_name);
        if (inserted) {
            it->second = {r.location_name, r.location_type, *r.latitude, *r.longitude, 0};
        }
        ++it->second.image_count;
    }
    std::vector<LocationAggregate> out;
    out.reserve(by_name.size());
    for (auto& [_, row] : by_name) out.push_back(std::move(row));
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.image_count > b.image_count; });
    return out;
}

CollectionStats collection_stats(const CollectionIndex& index) {
    CollectionStats s;
    s.n_images = index.size();
    s.n_detections_retained = index.n_detections();
    s.mean_detections_per_image =
        s.n_images > 0 ? static_cast<double>(s.n_detections_retained) / static_cast<double>(s.n_images) : 0.0;
    s.n_geocoded = static_cast<std::size_t>(
        std::count_if(index.records().begin(), index.records().end(), [](const auto& r) { return r.geocoded(); }));
    return s;
}

FacetSummary facet_summary(const CollectionIndex& index) {
    FacetSummary out;
    auto collect = [](const auto& postings, std::vector<FacetValue>& into) {
        for (const auto& [value, posting] : postings) {
            if constexpr (std::is_same_v<std::decay_t<decltype(value)>, Source>) {
                into.push_back({std::string(to_string(value)), posting.size()});
            } else {
                if (!value.empty()) into.push_back({value, posting.size()});
            }
        }
    };
    collect(index.artist_postings(), out.artists);
    collect(index.location_postings(), out.locations);
    collect(index.source_postings(), out.sources);
    collect(index.label_postings(), out.labels);

    std::map<LocationType, std::size_t> types;
    for (const auto& r : index.records()) {
        if (!r.location_name.empty()) ++types[r.location_type];
        for (auto y : {r.year_min, r.year_max}) {
            if (!y) continue;
            if (!out.years) out.years = YearSpan{*y, *y};
            out.years->min = std::min(out.years->min, *y);
            out.years->max = std::max(out.years->max, *y);
        }
    }
    for (const auto& [type, count] : types) out.location_types.push_back({std::string(to_string(type)), count});
    return out;
}

}  // namespace atelier
