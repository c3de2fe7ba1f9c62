#include "atelier/geocode.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

#include "atelier/csv.hpp"
#include "atelier/error.hpp"
#include "atelier/ingest.hpp"
#include "atelier/text.hpp"

namespace atelier::geo {

namespace {

constexpr std::array<std::string_view, 4> kGazetteerColumns = {"key", "latitude", "longitude", "location_type"};
constexpr std::array<std::string_view, 3> kCacheColumns = {"key", "latitude", "longitude"};

bool in_range(const Point& p) {
    return p.latitude >= -90 && p.latitude <= 90 && p.longitude >= -180 && p.longitude <= 180;
}

Point parse_point(const csv::Header& header, const csv::Row& row) {
    const auto lat = text::parse_double(text::trim(header.get(row, "latitude")));
    const auto lon = text::parse_double(text::trim(header.get(row, "longitude")));
    if (!lat || !lon || !in_range({*lat, *lon})) {
        throw Error(ErrorCode::invalid_record, "row " + std::to_string(row.number) + ": invalid coordinates");
    }
    return {*lat, *lon};
}

void check_width(const csv::Header& header, const csv::Row& row) {
    if (row.fields.size() != header.width()) {
        throw Error(ErrorCode::invalid_record, "row " + std::to_string(row.number) + ": expected " +
                                                   std::to_string(header.width()) + " fields");
    }
}

std::optional<double> json_number(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return text::parse_double(text::trim(v.get<std::string>()));
    return std::nullopt;
}

}  // namespace

std::string normalize_location(std::string_view name) {
    std::string key = text::collapse_whitespace(text::to_lower(name));
    while (!key.empty() && std::ispunct(static_cast<unsigned char>(key.back()))) key.pop_back();
    return text::trim(key);
}

Gazetteer Gazetteer::parse(std::string_view content) {
    const auto rows = csv::parse_utf8(content);
    if (rows.empty()) throw Error(ErrorCode::missing_header, "gazetteer: missing column: key (empty document)");
    const csv::Header header(rows.front(), kGazetteerColumns);
    Gazetteer g;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        check_width(header, row);
        const std::string type_text = text::trim(header.get(row, "location_type"));
        auto type = type_text.empty() ? std::optional(LocationType::unknown) : location_type_from_string(type_text);
        if (!type) {
            throw Error(ErrorCode::invalid_record,
                        "row " + std::to_string(row.number) + ": unknown location_type '" + type_text + "'");
        }
        g.add(header.get(row, "key"), {parse_point(header, row), *type});
    }
    return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
    try {
        return parse(read_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void Gazetteer::add(std::string_view key, GazetteerEntry entry) {
    std::string k = normalize_location(key);
    if (!k.empty()) entries_.insert_or_assign(std::move(k), entry);
}

const GazetteerEntry* Gazetteer::find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

GeoCache::GeoCache(GeoCache&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    entries_ = std::move(other.entries_);
}

GeoCache& GeoCache::operator=(GeoCache&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        entries_ = std::move(other.entries_);
    }
    return *this;
}

GeoCache GeoCache::parse(std::string_view content) {
    GeoCache cache;
    const auto rows = csv::parse_utf8(content);
    if (rows.empty()) return cache;
    const csv::Header header(rows.front(), kCacheColumns);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        check_width(header, rows[i]);
        cache.entries_.insert_or_assign(header.get(rows[i], "key"), parse_point(header, rows[i]));
    }
    return cache;
}

GeoCache GeoCache::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    try {
        return parse(read_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::optional<Point> GeoCache::find(std::string_view key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void GeoCache::put(std::string_view key, Point point) {
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(std::string(key), point);
}

std::size_t GeoCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::string GeoCache::serialize() const {
    std::shared_lock lock(mutex_);
    std::string out;
    csv::append_row(out, {"key", "latitude", "longitude"});
    for (const auto& [key, p] : entries_) {
        csv::append_row(out, {key, text::format_double(p.latitude), text::format_double(p.longitude)});
    }
    return out;
}

void GeoCache::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

HttpGeoProvider::HttpGeoProvider(std::string_view base_url, std::chrono::milliseconds interval,
                                 std::chrono::milliseconds timeout)
    : gate_(interval), timeout_(timeout) {
    auto parsed = net::parse_url(base_url);
    if (!parsed) throw Error(ErrorCode::invalid_url, "geocoder: invalid base url '" + std::string(base_url) + "'");
    base_ = std::move(*parsed);
    base_.target = base_.target.substr(0, base_.target.find('?'));
    while (base_.target.ends_with('/')) base_.target.pop_back();
    base_.target += "/search";
}

ProviderAnswer HttpGeoProvider::lookup(std::string_view key) {
    std::optional<net::HttpResponse> response;
    {
        auto pass = gate_.acquire(base_.origin());
        response = net::http_get(base_, {{"q", std::string(key)}, {"format", "json"}}, timeout_);
    }
    if (!response) throw Error(ErrorCode::provider_unavailable, "geocoder unreachable at " + base_.origin());
    if (response->status != 200) {
        throw Error(ErrorCode::provider_unavailable, "geocoder answered HTTP " + std::to_string(response->status));
    }
    const auto body = nlohmann::json::parse(response->body, nullptr, false);
    if (body.is_discarded() || !body.is_array()) {
        throw Error(ErrorCode::provider_unavailable, "geocoder answered something other than a JSON array");
    }
    ProviderAnswer answer;
    answer.n_candidates = body.size();
    for (const auto& candidate : body) {
        if (!candidate.is_object() || !candidate.contains("lat") || !candidate.contains("lon")) continue;
        auto lat = json_number(candidate["lat"]);
        auto lon = json_number(candidate["lon"]);
        if (lat && lon && in_range({*lat, *lon})) {
            answer.point = Point{*lat, *lon};
            break;
        }
    }
    return answer;
}

std::string_view to_string(Provenance provenance) {
    switch (provenance) {
        case Provenance::gazetteer: return "gazetteer";
        case Provenance::provider: return "provider";
        case Provenance::cache: return "cache";
    }
    return "unknown";
}

GeoResult geocode(std::string_view key, const Gazetteer& gazetteer, GeoProvider* provider, GeoCache& cache) {
    GeoResult result;
    result.query = std::string(key);
    if (key.empty()) return result;

    const GazetteerEntry* entry = gazetteer.find(key);
    if (entry) result.location_type = entry->type;

    if (auto hit = cache.find(key)) {
        result.point = hit;
        result.provenance = Provenance::cache;
    } else if (entry) {
        result.point = entry->point;
        result.provenance = Provenance::gazetteer;
    } else if (provider) {
        const ProviderAnswer answer = provider->lookup(key);
        if (answer.point) {
            cache.put(key, *answer.point);
            result.point = answer.point;
            result.provenance = Provenance::provider;
            result.ambiguous = answer.n_candidates > 1;
        }
    }
    result.resolved = result.point.has_value();
    return result;
}

GeocodeReport geocode_records(std::vector<ArtworkRecord>& records, const Gazetteer& gazetteer, GeoProvider* provider,
                              GeoCache& cache) {
    GeocodeReport report;
    std::set<std::string> unresolved, ambiguous;
    std::map<std::string, GeoResult> seen;  // one lookup per distinct key
    for (auto& r : records) {
        if (r.geocoded()) continue;
        const std::string key = normalize_location(r.location_name);
        if (key.empty()) continue;
        auto it = seen.find(key);
        if (it == seen.end()) it = seen.emplace(key, geocode(key, gazetteer, provider, cache)).first;
        const GeoResult& g = it->second;
        if (!g.resolved) {
            unresolved.insert(key);
            continue;
        }
        r.latitude = g.point->latitude;
        r.longitude = g.point->longitude;
        if (r.location_type == LocationType::unknown) r.location_type = g.location_type;
        if (g.ambiguous) ambiguous.insert(key);
        ++report.n_resolved;
    }
    report.unresolved.assign(unresolved.begin(), unresolved.end());
    report.ambiguous.assign(ambiguous.begin(), ambiguous.end());
    return report;
}

}  // namespace atelier::geo
