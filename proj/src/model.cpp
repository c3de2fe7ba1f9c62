#include "atelier/model.hpp"

#include <cmath>

#include "atelier/error.hpp"
#include "atelier/text.hpp"

namespace atelier {

std::string_view to_string(Source source) {
    switch (source) {
        case Source::USHMM: return "USHMM";
        case Source::JOODS: return "JOODS";
        case Source::NIOD: return "NIOD";
        case Source::OTHER: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(LocationType type) {
    switch (type) {
        case LocationType::camp: return "camp";
        case LocationType::ghetto: return "ghetto";
        case LocationType::city: return "city";
        case LocationType::region: return "region";
        case LocationType::country: return "country";
        case LocationType::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<Source> source_from_string(std::string_view s) {
    for (auto v : {Source::USHMM, Source::JOODS, Source::NIOD, Source::OTHER}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

std::optional<LocationType> location_type_from_string(std::string_view s) {
    for (auto v : {LocationType::camp, LocationType::ghetto, LocationType::city, LocationType::region,
                   LocationType::country, LocationType::unknown}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) {
    const std::string key = text::to_lower(text::collapse_whitespace(s));
    if (key == "ushmm" || key == "united states holocaust memorial museum") return Source::USHMM;
    if (key == "joods" || key == "jck" || key == "joods cultureel kwartier" || key == "jewish cultural quarter")
        return Source::JOODS;
    if (key == "niod" || key == "niod beeldbank") return Source::NIOD;
    if (key == "other") return Source::OTHER;
    return std::nullopt;
}

std::optional<LocationType> parse_location_type(std::string_view s) {
    const std::string key = text::to_lower(text::trim(s));
    if (key == "concentration camp" || key == "transit camp") return LocationType::camp;
    if (key == "town" || key == "village") return LocationType::city;
    return location_type_from_string(key);
}

int source_priority(Source source) noexcept {
    switch (source) {
        case Source::USHMM: return 0;
        case Source::JOODS: return 1;
        case Source::NIOD: return 2;
        case Source::OTHER: return 3;
    }
    return 3;
}

std::vector<Violation> validate_record(const ArtworkRecord& r) {
    std::vector<Violation> out;
    if (r.id.empty()) out.push_back({"id", "empty"});
    if (r.year_min && r.year_max && *r.year_min > *r.year_max) {
        out.push_back({"year_min", "year_min > year_max"});
    }
    if (r.latitude.has_value() != r.longitude.has_value()) {
        out.push_back({r.latitude ? "longitude" : "latitude", "latitude and longitude must be present together"});
    }
    if (r.latitude && !(std::isfinite(*r.latitude) && *r.latitude >= -90.0 && *r.latitude <= 90.0)) {
        out.push_back({"latitude", "out of range [-90, 90]"});
    }
    if (r.longitude && !(std::isfinite(*r.longitude) && *r.longitude >= -180.0 && *r.longitude <= 180.0)) {
        out.push_back({"longitude", "out of range [-180, 180]"});
    }
    return out;
}

bool BoundingBox::valid() const noexcept {
    auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    return unit(ymin) && unit(xmin) && unit(ymax) && unit(xmax) && ymin < ymax && xmin < xmax;
}

void DetectionFilterConfig::validate() const {
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
        throw Error(ErrorCode::invalid_config, "min_confidence must lie in [0, 1]");
    }
    if (max_per_image < 1) throw Error(ErrorCode::invalid_config, "max_per_image must be >= 1");
    if (max_per_image > max_raw_per_image) {
        throw Error(ErrorCode::invalid_config, "max_per_image must not exceed max_raw_per_image");
    }
}

}  // namespace atelier
