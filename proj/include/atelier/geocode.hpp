#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "atelier/model.hpp"
#include "atelier/net.hpp"

namespace atelier::geo {

struct Point {
    double latitude = 0;
    double longitude = 0;
    bool operator==(const Point&) const = default;
};

// Lowercase, whitespace collapsed, trailing punctuation removed.
std::string normalize_location(std::string_view name);

struct GazetteerEntry {
    Point point;
    LocationType type = LocationType::unknown;
};

// Offline table: CSV key,latitude,longitude,location_type. Keys are stored
// normalized.
class Gazetteer {
public:
    Gazetteer() = default;

    // Throws Error(missing_header, unexpected_header, invalid_record, ...).
    static Gazetteer parse(std::string_view csv);
    static Gazetteer load(const std::filesystem::path& path);

    void add(std::string_view key, GazetteerEntry entry);
    const GazetteerEntry* find(std::string_view key) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, GazetteerEntry, std::less<>> entries_;
};

// Persistent key -> point cache, CSV key,latitude,longitude. Safe for
// concurrent readers and writers.
class GeoCache {
public:
    GeoCache() = default;
    GeoCache(GeoCache&& other) noexcept;
    GeoCache& operator=(GeoCache&& other) noexcept;

    static GeoCache parse(std::string_view csv);
    // A missing file yields an empty cache.
    static GeoCache load(const std::filesystem::path& path);

    std::optional<Point> find(std::string_view key) const;
    void put(std::string_view key, Point point);
    std::size_t size() const;

    // Sorted by key, so saving is deterministic.
    std::string serialize() const;
    void save(const std::filesystem::path& path) const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, Point, std::less<>> entries_;
};

struct ProviderAnswer {
    std::optional<Point> point;  // first candidate
    std::size_t n_candidates = 0;
};

class GeoProvider {
public:
    virtual ~GeoProvider() = default;
    // Throws Error(provider_unavailable) when the service cannot be reached.
    virtual ProviderAnswer lookup(std::string_view key) = 0;
};

// Nominatim-style service: GET <base>/search?q=<key>&format=json answering a
// JSON array of {"lat": "...", "lon": "..."}. At most one request per
// interval, measured from the end of the previous request.
class HttpGeoProvider : public GeoProvider {
public:
    // Throws Error(invalid_url).
    explicit HttpGeoProvider(std::string_view base_url,
                             std::chrono::milliseconds interval = std::chrono::milliseconds(1000),
                             std::chrono::milliseconds timeout = std::chrono::seconds(10));

    ProviderAnswer lookup(std::string_view key) override;

private:
    net::Url base_;
    net::RateGate gate_;
    std::chrono::milliseconds timeout_;
};

enum class Provenance { gazetteer, provider, cache };
std::string_view to_string(Provenance provenance);

struct GeoResult {
    std::string query;
    std::optional<Point> point;  // present iff resolved
    std::optional<Provenance> provenance;
    bool resolved = false;
    bool ambiguous = false;  // provider offered more than one candidate
    LocationType location_type = LocationType::unknown;
};

// Lookup order cache, gazetteer, provider. Provider hits are cached. An
// empty key resolves to nothing without touching the provider.
GeoResult geocode(std::string_view key, const Gazetteer& gazetteer, GeoProvider* provider, GeoCache& cache);

struct GeocodeReport {
    std::size_t n_resolved = 0;
    std::vector<std::string> unresolved;  // distinct location keys
    std::vector<std::string> ambiguous;
};

// Fills latitude/longitude (and an unknown location_type) in place for
// every record with a location_name; existing coordinates are kept.
GeocodeReport geocode_records(std::vector<ArtworkRecord>& records, const Gazetteer& gazetteer,
                              GeoProvider* provider, GeoCache& cache);

}  // namespace atelier::geo
