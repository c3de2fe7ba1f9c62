#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "atelier/query.hpp"

// Transport-independent endpoint logic: each function maps the index plus
// decoded query parameters to a status code and a JSON body.
namespace atelier::api {

using QueryParams = std::multimap<std::string, std::string>;

struct Response {
    int status = 200;
    nlohmann::json body;
};

// {"error": {"code": ..., "message": ...}}
nlohmann::json error_body(std::string_view code, std::string_view message);

// Thrown for unusable query parameters; maps to 400.
struct BadRequest {
    std::string message;
};

// Facet parameters: artist, location, source, label (repeatable),
// year_min and year_max (either may be omitted). Throws BadRequest.
FilterSpec parse_filter(const QueryParams& params);

// "/images/<percent-encoded relative path>", or "" for no image.
std::string image_url(std::string_view image_path);

nlohmann::json artwork_summary(const ArtworkRecord& record);
nlohmann::json artwork_detail(const CollectionIndex& index, const ArtworkRecord& record);

using SeedSource = std::function<std::uint64_t()>;

Response health(const CollectionIndex& index);
Response facets(const CollectionIndex& index);
// Filter params plus seed and page_size; seed_source supplies the seed when
// the request has none, and the seed used is echoed back.
Response artworks(const CollectionIndex& index, const QueryParams& params, const SeedSource& seed_source);
Response artwork(const CollectionIndex& index, std::string_view id);
Response wordcloud(const CollectionIndex& index, const QueryParams& params);
Response map(const CollectionIndex& index, const QueryParams& params);

}  // namespace atelier::api
