#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atelier/error.hpp"
#include "atelier/html.hpp"
#include "atelier/ingest.hpp"
#include "atelier/model.hpp"

namespace atelier::harvest {

// raw field key -> ArtworkDraft member name
using FieldMapping = std::map<std::string, std::string, std::less<>>;

// Identity mapping over the draft member names.
const FieldMapping& default_mapping();

struct FieldRule {
    std::string key;
    html::Selector selector;
    std::optional<std::string> attribute;  // text content when absent
};

// Declarative description of one catalog site; see docs/adapters.md.
struct SiteAdapter {
    std::string name;
    Source source = Source::OTHER;
    std::string base_url;
    html::Selector record_selector;
    std::vector<FieldRule> fields;
    FieldMapping mapping;

    // Throws Error(adapter_invalid) or Error(adapter_selector_invalid).
    static SiteAdapter parse(std::string_view yaml);
    static SiteAdapter load(const std::filesystem::path& path);
};

class AdapterRegistry {
public:
    // Throws Error(adapter_invalid) on a repeated name.
    void add(SiteAdapter adapter);
    const SiteAdapter* find(std::string_view name) const;
    std::size_t size() const noexcept { return adapters_.size(); }

private:
    std::vector<SiteAdapter> adapters_;
};

struct RawRecord {
    Source source = Source::OTHER;
    std::vector<std::pair<std::string, std::string>> fields;  // adapter order, unique keys
    std::string origin_url;

    const std::string* get(std::string_view key) const;
};

// One record per record_selector match, in document order. Field values are
// whitespace-collapsed text (or attribute values) of the first match inside
// the record; empty values are omitted, and so are records with no fields.
// origin_url is "<page_url>#<n>" with n counting records from 1.
std::vector<RawRecord> extract_records(std::string_view document, const SiteAdapter& adapter,
                                       std::string_view page_url = {});

struct TransformResult {
    ArtworkDraft draft;
    std::vector<Issue> issues;
};

// "<SOURCE>:" followed by hex64(fnv1a64(origin_url)).
std::string synthesize_id(Source source, std::string_view origin_url);

// Copies mapped fields into a draft. Unmapped keys become issues. source_url
// is resolved against base_url; image_path keeps only the final path
// segment; a missing id is synthesized from origin_url.
TransformResult transform(const RawRecord& raw, Source source, const FieldMapping& mapping = default_mapping(),
                          std::string_view base_url = {});

struct Politeness {
    std::chrono::milliseconds delay{1000};
    int max_retries = 3;
    std::chrono::milliseconds timeout{10000};
};

struct FetchResult {
    std::string url;
    int status = 0;
    std::string body;
    std::chrono::system_clock::time_point fetched_at;
};

// GET with per-origin spacing of at least politeness.delay between the end
// of one request and the start of the next, process wide. Transport
// failures, 429 and 5xx are retried up to max_retries times. Throws
// Error(invalid_url) or Error(network_unreachable).
FetchResult fetch_page(std::string_view url, const Politeness& politeness = {});

}  // namespace atelier::harvest
