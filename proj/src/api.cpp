#include "atelier/api.hpp"

#include <charconv>
#include <climits>

#include "atelier/analytics.hpp"
#include "atelier/ingest.hpp"
#include "atelier/net.hpp"
#include "atelier/text.hpp"

namespace atelier::api {

namespace {

constexpr std::size_t kMaxPageSize = 1000;

using json = nlohmann::json;

std::uint64_t parse_u64(const std::string& name, const std::string& value) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || end != value.data() + value.size()) {
        throw BadRequest{name + " must be a non-negative integer, got '" + value + "'"};
    }
    return v;
}

const std::string* single(const QueryParams& params, const std::string& name) {
    auto [lo, hi] = params.equal_range(name);
    if (lo == hi) return nullptr;
    if (std::next(lo) != hi) throw BadRequest{name + " given more than once"};
    return &lo->second;
}

std::size_t bounded(const QueryParams& params, const std::string& name, std::size_t fallback) {
    const std::string* raw = single(params, name);
    if (!raw) return fallback;
    const std::uint64_t v = parse_u64(name, *raw);
    if (v < 1 || v > kMaxPageSize) {
        throw BadRequest{name + " must be between 1 and " + std::to_string(kMaxPageSize)};
    }
    return static_cast<std::size_t>(v);
}

json optional_number(const auto& v) { return v ? json(*v) : json(nullptr); }

json box_json(const BoundingBox& b) { return {{"ymin", b.ymin}, {"xmin", b.xmin}, {"ymax", b.ymax}, {"xmax", b.xmax}}; }

json facet_values(const std::vector<FacetValue>& values) {
    json out = json::array();
    for (const auto& v : values) out.push_back({{"value", v.value}, {"count", v.count}});
    return out;
}

}  // namespace

json error_body(std::string_view code, std::string_view message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

FilterSpec parse_filter(const QueryParams& params) {
    FilterSpec spec;
    for (const auto& [key, value] : params) {
        if (key == "artist") {
            spec.artists.insert(value);
        } else if (key == "location") {
            spec.locations.insert(value);
        } else if (key == "label") {
            spec.labels.insert(value);
        } else if (key == "source") {
            auto s = parse_source(value);
            if (!s) throw BadRequest{"unknown source '" + value + "'"};
            spec.sources.insert(*s);
        }
    }
    const std::string* ymin = single(params, "year_min");
    const std::string* ymax = single(params, "year_max");
    if (ymin || ymax) {
        auto year = [](const std::string& name, const std::string* raw, int fallback) {
            if (!raw) return fallback;
            auto v = text::parse_int(*raw);
            if (!v) throw BadRequest{name + " must be an integer, got '" + *raw + "'"};
            return *v;
        };
        YearSpan span{year("year_min", ymin, INT_MIN), year("year_max", ymax, INT_MAX)};
        if (span.min > span.max) throw BadRequest{"year_min is greater than year_max"};
        spec.year_range = span;
    }
    return spec;
}

std::string image_url(std::string_view image_path) {
    if (image_path.empty()) return {};
    std::string out = "/images";
    std::size_t pos = 0;
    while (pos <= image_path.size()) {
        const auto slash = image_path.find('/', pos);
        const auto seg = image_path.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos);
        out += "/" + net::percent_encode(seg);
        if (slash == std::string_view::npos) break;
        pos = slash + 1;
    }
    return out;
}

json artwork_summary(const ArtworkRecord& r) {
    return {
        {"id", r.id},
        {"title", r.title},
        {"artist", r.artist},
        {"year", format_year(r.year_min, r.year_max)},
        {"year_min", optional_number(r.year_min)},
        {"year_max", optional_number(r.year_max)},
        {"location", r.location_name},
        {"location_type", to_string(r.location_type)},
        {"source", to_string(r.source)},
        {"image_url", image_url(r.image_path)},
    };
}

json artwork_detail(const CollectionIndex& index, const ArtworkRecord& r) {
    json out = artwork_summary(r);
    out["latitude"] = optional_number(r.latitude);
    out["longitude"] = optional_number(r.longitude);
    out["source_url"] = r.source_url;
    out["copyright"] = r.copyright;
    out["image_path"] = r.image_path;
    json detections = json::array();
    for (const auto& d : index.detections_of(r.id)) {
        detections.push_back(
            {{"label", d.label}, {"raw_label", d.raw_label}, {"confidence", d.confidence}, {"box", box_json(d.box)}});
    }
    out["detections"] = std::move(detections);
    return out;
}

Response health(const CollectionIndex& index) { return {200, {{"status", "ok"}, {"n_images", index.size()}}}; }

Response facets(const CollectionIndex& index) {
    const FacetSummary s = facet_summary(index);
    json years = s.years ? json{{"min", s.years->min}, {"max", s.years->max}} : json(nullptr);
    return {200,
            {{"artists", facet_values(s.artists)},
             {"locations", facet_values(s.locations)},
             {"location_types", facet_values(s.location_types)},
             {"sources", facet_values(s.sources)},
             {"labels", facet_values(s.labels)},
             {"years", std::move(years)}}};
}

Response artworks(const CollectionIndex& index, const QueryParams& params, const SeedSource& seed_source) {
    const FilterSpec spec = parse_filter(params);
    const std::size_t page_size = bounded(params, "page_size", kDefaultPageSize);
    const std::string* seed_text = single(params, "seed");
    const std::uint64_t seed = seed_text ? parse_u64("seed", *seed_text) : seed_source();

    const std::vector<std::string> ids = apply_filter(index, spec);
    json items = json::array();
    for (const auto& id : sample_gallery(ids, seed, page_size)) items.push_back(artwork_summary(*index.find(id)));
    return {200, {{"seed", seed}, {"page_size", page_size}, {"total", ids.size()}, {"items", std::move(items)}}};
}

Response artwork(const CollectionIndex& index, std::string_view id) {
    const ArtworkRecord* r = index.find(id);
    if (!r) return {404, error_body("not-found", "no artwork with id '" + std::string(id) + "'")};
    return {200, artwork_detail(index, *r)};
}

Response wordcloud(const CollectionIndex& index, const QueryParams& params) {
    const FilterSpec spec = parse_filter(params);
    const std::size_t top_n = bounded(params, "top_n", kDefaultWordCloudSize);
    json items = json::array();
    for (const auto& f : label_frequencies(index, spec, top_n)) {
        items.push_back({{"label", f.label}, {"detection_count", f.detection_count}, {"image_count", f.image_count}});
    }
    return {200, {{"top_n", top_n}, {"items", std::move(items)}}};
}

Response map(const CollectionIndex& index, const QueryParams& params) {
    const FilterSpec spec = parse_filter(params);
    json items = json::array();
    for (const auto& a : location_aggregates(index, spec)) {
        items.push_back({{"location_name", a.location_name},
                         {"location_type", to_string(a.location_type)},
                         {"latitude", a.latitude},
                         {"longitude", a.longitude},
                         {"image_count", a.image_count}});
    }
    return {200, {{"items", std::move(items)}}};
}

}  // namespace atelier::api
