#include "atelier/harvest.hpp"

#include <algorithm>

#include <yaml-cpp/yaml.h>

#include "atelier/net.hpp"
#include "atelier/text.hpp"

namespace atelier::harvest {

namespace {

using Member = std::string ArtworkDraft::*;

const std::map<std::string_view, Member>& draft_members() {
    static const std::map<std::string_view, Member> members = {
        {"id", &ArtworkDraft::id},
        {"title", &ArtworkDraft::title},
        {"artist", &ArtworkDraft::artist},
        {"year", &ArtworkDraft::year},
        {"location_name", &ArtworkDraft::location_name},
        {"location_type", &ArtworkDraft::location_type},
        {"latitude", &ArtworkDraft::latitude},
        {"longitude", &ArtworkDraft::longitude},
        {"source", &ArtworkDraft::source},
        {"source_url", &ArtworkDraft::source_url},
        {"copyright", &ArtworkDraft::copyright},
        {"image_path", &ArtworkDraft::image_path},
        {"phash", &ArtworkDraft::phash},
    };
    return members;
}

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::adapter_invalid, "adapter: " + why); }

std::string scalar(const YAML::Node& node, const char* key, bool required) {
    const YAML::Node value = node[key];
    if (!value) {
        if (required) invalid(std::string("missing key '") + key + "'");
        return {};
    }
    if (!value.IsScalar()) invalid(std::string("'") + key + "' must be a string");
    return value.Scalar();
}

// "selector@attr" -> (selector, attr); '@' inside brackets belongs to the selector.
std::pair<std::string, std::optional<std::string>> split_attribute(const std::string& spec) {
    const auto at = spec.rfind('@');
    if (at == std::string::npos || spec.find(']', at) != std::string::npos) return {spec, std::nullopt};
    std::string attr = text::trim(spec.substr(at + 1));
    if (attr.empty()) invalid("empty attribute name in '" + spec + "'");
    return {text::trim(spec.substr(0, at)), text::to_lower(attr)};
}

std::string last_segment(std::string_view value) {
    std::string_view v = value.substr(0, value.find_first_of("?#"));
    while (v.ends_with('/')) v.remove_suffix(1);
    const auto slash = v.rfind('/');
    return std::string(slash == std::string_view::npos ? v : v.substr(slash + 1));
}

net::RateGate& origin_gate() {
    static net::RateGate gate(std::chrono::milliseconds(1000));
    return gate;
}

}  // namespace

const FieldMapping& default_mapping() {
    static const FieldMapping mapping = [] {
        FieldMapping m;
        for (const auto& [name, member] : draft_members()) m.emplace(name, name);
        return m;
    }();
    return mapping;
}

SiteAdapter SiteAdapter::parse(std::string_view yaml) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml));
    } catch (const YAML::Exception& e) {
        invalid(std::string("not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) invalid("top level must be a mapping");

    SiteAdapter adapter;
    adapter.name = text::trim(scalar(root, "name", true));
    if (adapter.name.empty()) invalid("empty name");
    const std::string source = scalar(root, "source", true);
    auto parsed_source = parse_source(source);
    if (!parsed_source) invalid("unknown source '" + source + "'");
    adapter.source = *parsed_source;
    adapter.base_url = scalar(root, "base_url", false);
    if (!adapter.base_url.empty() && !net::parse_url(adapter.base_url)) invalid("bad base_url '" + adapter.base_url + "'");
    adapter.record_selector = html::Selector::compile(scalar(root, "record_selector", true));

    const YAML::Node fields = root["fields"];
    if (!fields || !fields.IsMap() || fields.size() == 0) invalid("'fields' must be a non-empty mapping");
    for (const auto& entry : fields) {
        if (!entry.second.IsScalar()) invalid("field '" + entry.first.as<std::string>() + "' must map to a selector");
        const std::string key = entry.first.as<std::string>();
        auto [selector, attribute] = split_attribute(entry.second.Scalar());
        adapter.fields.push_back({key, html::Selector::compile(selector), std::move(attribute)});
    }

    adapter.mapping = default_mapping();
    if (const YAML::Node mapping = root["mapping"]) {
        if (!mapping.IsMap()) invalid("'mapping' must be a mapping");
        for (const auto& entry : mapping) {
            const std::string target = entry.second.as<std::string>();
            if (!draft_members().contains(target)) invalid("mapping target '" + target + "' is not a record field");
            adapter.mapping[entry.first.as<std::string>()] = target;
        }
    }
    return adapter;
}

SiteAdapter SiteAdapter::load(const std::filesystem::path& path) {
    try {
        return parse(read_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void AdapterRegistry::add(SiteAdapter adapter) {
    if (find(adapter.name)) invalid("duplicate adapter name '" + adapter.name + "'");
    adapters_.push_back(std::move(adapter));
}

const SiteAdapter* AdapterRegistry::find(std::string_view name) const {
    auto it = std::find_if(adapters_.begin(), adapters_.end(), [&](const SiteAdapter& a) { return a.name == name; });
    return it == adapters_.end() ? nullptr : &*it;
}

const std::string* RawRecord::get(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::vector<RawRecord> extract_records(std::string_view document, const SiteAdapter& adapter,
                                       std::string_view page_url) {
    const html::Document doc = html::Document::parse(document);
    std::vector<RawRecord> out;
    std::size_t n = 0;
    for (const html::Node* node : adapter.record_selector.select(doc.root())) {
        ++n;
        RawRecord record;
        record.source = adapter.source;
        record.origin_url = std::string(page_url) + "#" + std::to_string(n);
        for (const auto& rule : adapter.fields) {
            const html::Node* match = rule.selector.select_first(*node);
            if (!match) continue;
            std::string value;
            if (rule.attribute) {
                if (auto attr = match->attribute(*rule.attribute)) value = text::collapse_whitespace(*attr);
            } else {
                value = match->text_content();
            }
            if (!value.empty()) record.fields.emplace_back(rule.key, std::move(value));
        }
        if (!record.fields.empty()) out.push_back(std::move(record));
    }
    return out;
}

std::string synthesize_id(Source source, std::string_view origin_url) {
    return std::string(to_string(source)) + ":" + text::hex64(text::fnv1a64(origin_url));
}

TransformResult transform(const RawRecord& raw, Source source, const FieldMapping& mapping,
                          std::string_view base_url) {
    TransformResult out;
    ArtworkDraft& d = out.draft;
    for (const auto& [key, value] : raw.fields) {
        auto target = mapping.find(key);
        if (target == mapping.end()) {
            out.issues.push_back({0, "", "unmapped field: " + key});
            continue;
        }
        std::string& slot = d.*draft_members().at(target->second);
        if (!slot.empty()) {
            out.issues.push_back({0, target->second, "'" + key + "' overrides an earlier value"});
        }
        slot = value;
    }
    if (!d.source_url.empty() && !base_url.empty()) d.source_url = net::resolve_url(base_url, d.source_url);
    if (!d.image_path.empty()) d.image_path = last_segment(d.image_path);
    if (d.source.empty()) d.source = std::string(to_string(source));
    if (text::trim(d.id).empty()) d.id = synthesize_id(source, raw.origin_url);
    return out;
}

FetchResult fetch_page(std::string_view url, const Politeness& politeness) {
    if (politeness.delay.count() < 0 || politeness.max_retries < 0) {
        throw Error(ErrorCode::invalid_config, "politeness: delay and max_retries must be non-negative");
    }
    const auto parsed = net::parse_url(url);
    if (!parsed) throw Error(ErrorCode::invalid_url, "invalid url '" + std::string(url) + "'");

    std::optional<net::HttpResponse> last;
    for (int attempt = 0; attempt <= politeness.max_retries; ++attempt) {
        {
            auto pass = origin_gate().acquire(parsed->origin(), politeness.delay);
            last = net::http_get(*parsed, {}, politeness.timeout);
        }
        if (last && last->status != 429 && last->status < 500) break;
    }
    if (!last) {
        throw Error(ErrorCode::network_unreachable, "no response from " + parsed->origin() + " after " +
                                                        std::to_string(politeness.max_retries + 1) + " attempts");
    }
    return FetchResult{std::string(url), last->status, std::move(last->body), std::chrono::system_clock::now()};
}

}  // namespace atelier::harvest
