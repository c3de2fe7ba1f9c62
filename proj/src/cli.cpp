#include "atelier/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <future>
#include <ostream>
#include <set>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "atelier/analytics.hpp"
#include "atelier/dedup.hpp"
#include "atelier/geocode.hpp"
#include "atelier/harvest.hpp"
#include "atelier/ingest.hpp"
#include "atelier/net.hpp"
#include "atelier/server.hpp"

namespace atelier::cli {

namespace fs = std::filesystem;

namespace {

// Data-level failure with context already in the message.
struct DataError {
    std::string message;
};

void warn(std::ostream& err, const std::string& context, const Issue& issue) {
    err << "warning: " << context << ": " << issue.to_string() << "\n";
}

struct HarvestOptions {
    std::string adapter;
    std::string input_dir;
    std::vector<std::string> urls;
    std::string out;
    int delay_ms = 1000;
    int max_retries = 3;
};

int harvest_command(const HarvestOptions& o, std::ostream& out, std::ostream& err) {
    const harvest::SiteAdapter adapter = harvest::SiteAdapter::load(o.adapter);

    struct Page {
        std::string url;
        std::string body;
    };
    std::vector<Page> pages;
    if (!o.input_dir.empty()) {
        if (!fs::is_directory(o.input_dir)) throw DataError{"not a directory: " + o.input_dir};
        std::vector<std::string> names;
        for (const auto& entry : fs::recursive_directory_iterator(o.input_dir)) {
            const auto ext = entry.path().extension().string();
            if (entry.is_regular_file() && (ext == ".html" || ext == ".htm")) {
                names.push_back(fs::relative(entry.path(), o.input_dir).generic_string());
            }
        }
        std::sort(names.begin(), names.end());
        for (const auto& name : names) {
            const std::string url = adapter.base_url.empty() ? "file:" + name : net::resolve_url(adapter.base_url, name);
            pages.push_back({url, read_file(fs::path(o.input_dir) / name)});
        }
    }
    const harvest::Politeness politeness{std::chrono::milliseconds(o.delay_ms), o.max_retries};
    for (const auto& url : o.urls) {
        auto fetched = harvest::fetch_page(url, politeness);
        if (fetched.status != 200) throw DataError{url + ": HTTP " + std::to_string(fetched.status)};
        pages.push_back({url, std::move(fetched.body)});
    }

    std::vector<ArtworkDraft> drafts;
    for (const auto& page : pages) {
        const auto records = harvest::extract_records(page.body, adapter, page.url);
        for (const auto& raw : records) {
            auto t = harvest::transform(raw, adapter.source, adapter.mapping, page.url);
            for (const auto& issue : t.issues) warn(err, raw.origin_url, issue);
            drafts.push_back(std::move(t.draft));
        }
    }
    write_file(o.out, serialize_raw_csv(drafts));
    out << "pages: " << pages.size() << "\nrecords: " << drafts.size() << "\n";
    return kExitOk;
}

struct IngestOptions {
    std::vector<std::string> in;
    std::string images;
    std::string out;
};

int ingest_command(const IngestOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<ArtworkRecord> records;
    std::set<std::string> seen;
    std::size_t n_rows = 0;
    for (const auto& path : o.in) {
        const RawParseResult raw = parse_raw_csv(read_file(path));
        n_rows += raw.drafts.size() + raw.issues.size();
        for (const auto& issue : raw.issues) warn(err, path, issue);
        for (std::size_t i = 0; i < raw.drafts.size(); ++i) {
            const std::size_t row = raw.rows[i];
            auto n = normalize_record(raw.drafts[i]);
            for (auto issue : n.issues) {
                issue.row = row;
                warn(err, path, issue);
            }
            const auto violations = validate_record(n.record);
            if (!violations.empty()) {
                for (const auto& v : violations) warn(err, path, {row, v.field, v.rule + "; row skipped"});
                continue;
            }
            if (!seen.insert(n.record.id).second) {
                warn(err, path, {row, "id", "duplicate id '" + n.record.id + "'; row skipped"});
                continue;
            }
            records.push_back(std::move(n.record));
        }
    }

    const auto files = list_image_files(o.images);
    const MatchReport match = match_images(records, files);
    const std::set<std::string> orphans(match.unmatched_records.begin(), match.unmatched_records.end());
    for (const auto& id : match.unmatched_records) {
        err << "warning: record '" << id << "' has no image file; dropped\n";
    }
    for (const auto& f : match.unmatched_files) err << "warning: image '" << f << "' has no record\n";
    std::erase_if(records, [&](const ArtworkRecord& r) { return orphans.contains(r.id); });

    write_file(o.out, serialize_metadata_csv(records));
    out << "rows: " << n_rows << "\nrecords: " << records.size()
        << "\nunmatched records: " << match.unmatched_records.size()
        << "\nunmatched files: " << match.unmatched_files.size() << "\n";
    return kExitOk;
}

std::vector<ArtworkRecord> read_metadata(const std::string& path, std::ostream& err) {
    auto parsed = parse_metadata_csv(read_file(path));
    for (const auto& issue : parsed.report.issues) warn(err, path, issue);
    return std::move(parsed.records);
}

struct DedupOptions {
    std::string in;
    std::string images;
    int threshold = kDefaultDedupThreshold;
    std::string out;
    std::string report;
};

int dedup_command(const DedupOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<ArtworkRecord> records = read_metadata(o.in, err);

    // Hash every image, one task per hardware thread.
    std::vector<std::optional<std::uint64_t>> hashes(records.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next++; i < records.size(); i = next++) {
                if (!records[i].image_path.empty()) {
                    hashes[i] = perceptual_hash(load_gray(fs::path(o.images) / records[i].image_path));
                }
            }
        }));
    }
    for (auto& t : tasks) t.get();

    std::vector<HashEntry> entries;
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].phash = hashes[i];
        if (hashes[i]) entries.push_back({records[i].id, *hashes[i]});
    }
    const auto clusters = select_survivors(find_duplicates(entries, o.threshold), records);
    const auto rows = dedup_report(clusters, entries);
    std::set<std::string> removed;
    for (const auto& r : rows) removed.insert(r.removed_id);
    std::erase_if(records, [&](const ArtworkRecord& r) { return removed.contains(r.id); });

    write_file(o.out, serialize_metadata_csv(records));
    if (!o.report.empty()) write_file(o.report, serialize_dedup_report(rows));
    out << "hashed: " << entries.size() << "\nremoved: " << removed.size() << "\nrecords: " << records.size()
        << "\n";
    return kExitOk;
}

struct GeocodeOptions {
    std::string in;
    std::string gazetteer;
    std::string out;
    std::string cache;
    std::string provider;
};

int geocode_command(const GeocodeOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<ArtworkRecord> records = read_metadata(o.in, err);
    const geo::Gazetteer gazetteer = geo::Gazetteer::load(o.gazetteer);
    geo::GeoCache cache = o.cache.empty() ? geo::GeoCache{} : geo::GeoCache::load(o.cache);
    std::unique_ptr<geo::GeoProvider> provider;
    if (!o.provider.empty()) provider = std::make_unique<geo::HttpGeoProvider>(o.provider);

    const auto report = geo::geocode_records(records, gazetteer, provider.get(), cache);
    for (const auto& key : report.unresolved) err << "warning: unresolved location '" << key << "'\n";
    for (const auto& key : report.ambiguous) err << "warning: ambiguous location '" << key << "', took first match\n";

    write_file(o.out, serialize_metadata_csv(records));
    if (!o.cache.empty()) cache.save(o.cache);
    out << "resolved: " << report.n_resolved << "\nunresolved locations: " << report.unresolved.size() << "\n";
    return kExitOk;
}

struct DataOptions {
    std::string data;
    std::string images;  // default <data>/images
    bool check_images = false;
};

LoadedCollection load(const DataOptions& o, std::ostream& err) {
    fs::path image_dir;
    if (o.check_images) image_dir = o.images.empty() ? fs::path(o.data) / "images" : fs::path(o.images);
    LoadedCollection c = load_collection(o.data, image_dir);
    for (const auto& w : c.warnings) err << "warning: " << w << "\n";
    return c;
}

int stats_command(const DataOptions& o, std::ostream& out, std::ostream& err) {
    const LoadedCollection c = load(o, err);
    const CollectionStats s = collection_stats(*c.index);
    char mean[64];
    std::snprintf(mean, sizeof mean, "%.9f", s.mean_detections_per_image);
    out << "images: " << s.n_images << "\ndetections: " << s.n_detections_retained
        << "\nmean detections per image: " << mean << "\ngeocoded: " << s.n_geocoded << "\n";
    return kExitOk;
}

struct ServeOptions {
    DataOptions data;
    std::string host = "0.0.0.0";
    int port = 8000;
    std::string cors_origin = "*";
    std::size_t threads = 32;
};

int serve_command(ServeOptions o, std::ostream& out, std::ostream& err) {
    o.data.check_images = true;
    const LoadedCollection c = load(o.data, err);

    // Block termination signals in every thread; one thread waits for them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ServerConfig config;
    config.host = o.host;
    config.port = o.port;
    config.image_dir = o.data.images.empty() ? fs::path(o.data.data) / "images" : fs::path(o.data.images);
    config.cors_origin = o.cors_origin;
    config.threads = o.threads;
    Server server(config, c.index);
    server.start();
    out << "serving " << c.index->size() << " images on http://" << o.host << ":" << server.port() << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.wait();
    waiter.join();
    out << "stopped" << std::endl;
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Artwork collection pipeline and exploration server", "atelier"};
    app.require_subcommand(1);

    HarvestOptions h;
    auto* harvest = app.add_subcommand("harvest", "Extract records from catalog pages into raw.csv");
    harvest->add_option("--adapter", h.adapter, "Site adapter file (YAML)")->required()->envname("ATELIER_ADAPTER");
    harvest->add_option("--input-dir", h.input_dir, "Directory of stored HTML pages")->envname("ATELIER_INPUT_DIR");
    harvest->add_option("--url", h.urls, "Page to fetch (repeatable)");
    harvest->add_option("--out", h.out, "Output raw CSV")->required()->envname("ATELIER_OUT");
    harvest->add_option("--delay-ms", h.delay_ms, "Politeness delay per host")
        ->check(CLI::NonNegativeNumber)
        ->envname("ATELIER_DELAY_MS");
    harvest->add_option("--max-retries", h.max_retries, "Retries on transient failure")
        ->check(CLI::NonNegativeNumber)
        ->envname("ATELIER_MAX_RETRIES");

    IngestOptions in;
    auto* ingest = app.add_subcommand("ingest", "Normalize raw.csv and match image files");
    ingest->add_option("--in", in.in, "Raw CSV (repeatable; later files lose id clashes)")->required()->envname("ATELIER_IN");
    ingest->add_option("--images", in.images, "Image directory")->required()->envname("ATELIER_IMAGES");
    ingest->add_option("--out", in.out, "Output metadata CSV")->required()->envname("ATELIER_OUT");

    DedupOptions d;
    auto* dedup = app.add_subcommand("dedup", "Remove near-duplicate images");
    dedup->add_option("--in", d.in, "Metadata CSV")->required()->envname("ATELIER_IN");
    dedup->add_option("--images", d.images, "Image directory")->required()->envname("ATELIER_IMAGES");
    dedup->add_option("--threshold,--dedup-threshold", d.threshold, "Maximum Hamming distance in bits")
        ->check(CLI::Range(0, 64))
        ->envname("ATELIER_DEDUP_THRESHOLD");
    dedup->add_option("--out", d.out, "Output metadata CSV")->required()->envname("ATELIER_OUT");
    dedup->add_option("--report", d.report, "Dedup report CSV")->envname("ATELIER_DEDUP_REPORT");

    GeocodeOptions g;
    auto* geocode = app.add_subcommand("geocode", "Attach coordinates to location names");
    geocode->add_option("--in", g.in, "Metadata CSV")->required()->envname("ATELIER_IN");
    geocode->add_option("--gazetteer", g.gazetteer, "Gazetteer CSV")->required()->envname("ATELIER_GAZETTEER");
    geocode->add_option("--out", g.out, "Output metadata CSV")->required()->envname("ATELIER_OUT");
    geocode->add_option("--cache", g.cache, "Geocode cache CSV")->envname("ATELIER_GEOCODE_CACHE");
    geocode->add_option("--provider", g.provider, "Geocoding service base URL")->envname("ATELIER_GEOCODER_URL");

    DataOptions st;
    auto* stats = app.add_subcommand("stats", "Print collection statistics");
    stats->add_option("--data", st.data, "Directory holding metadata.csv and detections.csv")
        ->required()
        ->envname("ATELIER_DATA_DIR");

    ServeOptions sv;
    auto* serve = app.add_subcommand("serve", "Serve the JSON API and images");
    serve->add_option("--data", sv.data.data, "Directory holding metadata.csv and detections.csv")
        ->required()
        ->envname("ATELIER_DATA_DIR");
    serve->add_option("--images", sv.data.images, "Image directory (default <data>/images)")
        ->envname("ATELIER_IMAGE_DIR");
    serve->add_option("--host", sv.host, "Bind address")->envname("ATELIER_HOST");
    serve->add_option("--port", sv.port, "TCP port")->check(CLI::Range(0, 65535))->envname("ATELIER_PORT");
    serve->add_option("--cors-origin", sv.cors_origin, "Allowed CORS origin")->envname("ATELIER_CORS_ORIGIN");
    serve->add_option("--threads", sv.threads, "Worker threads")->check(CLI::Range(1, 1024))->envname("ATELIER_THREADS");

    if (args.size() > 1 && !args[1].starts_with("-")) {
        if (!app.get_subcommand_no_throw(args[1])) {
            err << "error: unknown subcommand '" << args[1] << "'\n\n" << app.help();
            return kExitUsage;
        }
    }

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*harvest) return harvest_command(h, out, err);
        if (*ingest) return ingest_command(in, out, err);
        if (*dedup) return dedup_command(d, out, err);
        if (*geocode) return geocode_command(g, out, err);
        if (*stats) return stats_command(st, out, err);
        if (*serve) return serve_command(sv, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const DataError& e) {
        err << "error: " << e.message << "\n";
        return kExitDataError;
    }
    return kExitUsage;
}

}  // namespace atelier::cli
