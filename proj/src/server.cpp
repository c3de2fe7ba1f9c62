#include "atelier/server.hpp"

#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>

#include "atelier/api.hpp"
#include "atelier/detections.hpp"
#include "atelier/ingest.hpp"

namespace atelier {

namespace {

[[noreturn]] void load_failure(const std::filesystem::path& file, const std::string& detail) {
    throw Error(ErrorCode::data_load_failure, file.string() + ": " + detail);
}

std::string read_data_file(const std::filesystem::path& path) {
    if (!std::filesystem::is_regular_file(path)) load_failure(path, "file not found");
    return read_file(path);
}

}  // namespace

LoadedCollection load_collection(const std::filesystem::path& data_dir, const std::filesystem::path& image_dir,
                                 const DetectionFilterConfig& config) {
    const auto metadata_path = data_dir / kMetadataFile;
    const auto detections_path = data_dir / kDetectionsFile;

    MetadataParseResult metadata;
    DetectionParseResult detections;
    try {
        metadata = parse_metadata_csv(read_data_file(metadata_path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::data_load_failure) throw;
        load_failure(metadata_path, e.what());
    }
    if (!metadata.report.issues.empty()) load_failure(metadata_path, metadata.report.issues.front().to_string());
    try {
        detections = parse_detections_csv(read_data_file(detections_path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::data_load_failure) throw;
        load_failure(detections_path, e.what());
    }
    if (!detections.issues.empty()) load_failure(detections_path, detections.issues.front().to_string());

    for (const auto& r : metadata.records) {
        if (image_dir.empty() || r.image_path.empty()) continue;
        if (!std::filesystem::is_regular_file(image_dir / r.image_path)) {
            load_failure(metadata_path, "record '" + r.id + "': image_path: no such file " +
                                            (image_dir / r.image_path).string());
        }
    }

    LoadedCollection out;
    BuildReport report;
    try {
        out.index = std::make_shared<const CollectionIndex>(
            CollectionIndex::build(std::move(metadata.records), detections.records, config, &report));
    } catch (const Error& e) {
        load_failure(metadata_path, e.what());
    }
    for (const auto& issue : report.issues) out.warnings.push_back(detections_path.string() + ": " + issue.to_string());
    return out;
}

struct Server::Impl {
    ServerConfig config;
    httplib::Server http;
    std::thread worker;
    int bound_port = 0;

    mutable std::mutex index_mutex;
    std::shared_ptr<const CollectionIndex> index;

    std::mutex seed_mutex;
    std::mt19937_64 seeds{std::random_device{}()};

    std::shared_ptr<const CollectionIndex> snapshot() const {
        std::lock_guard lock(index_mutex);
        return index;
    }

    // Fits in a JSON number without loss (53 bits).
    std::uint64_t fresh_seed() {
        std::lock_guard lock(seed_mutex);
        return seeds() & ((std::uint64_t{1} << 53) - 1);
    }

    static void send(httplib::Response& res, const api::Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    }

    template <typename F>
    void route(const std::string& pattern, F handler) {
        http.Get(pattern, [this, handler](const httplib::Request& req, httplib::Response& res) {
            api::QueryParams params(req.params.begin(), req.params.end());
            try {
                send(res, handler(*snapshot(), req, params));
            } catch (const api::BadRequest& e) {
                send(res, {400, api::error_body("bad-request", e.message)});
            }
        });
    }

    void install() {
        http.new_task_queue = [n = config.threads] { return new httplib::ThreadPool(n); };
        // No SO_REUSEPORT: a second server on a taken port must fail to bind.
        http.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });

        route("/api/health", [](const CollectionIndex& idx, const auto&, const auto&) { return api::health(idx); });
        route("/api/facets", [](const CollectionIndex& idx, const auto&, const auto&) { return api::facets(idx); });
        route("/api/artworks", [this](const CollectionIndex& idx, const auto&, const api::QueryParams& p) {
            return api::artworks(idx, p, [this] { return fresh_seed(); });
        });
        route(R"(/api/artworks/([^/]+))", [](const CollectionIndex& idx, const httplib::Request& req, const auto&) {
            return api::artwork(idx, req.matches[1].str());
        });
        route("/api/wordcloud",
              [](const CollectionIndex& idx, const auto&, const api::QueryParams& p) { return api::wordcloud(idx, p); });
        route("/api/map", [](const CollectionIndex& idx, const auto&, const api::QueryParams& p) { return api::map(idx, p); });

        if (!config.image_dir.empty()) http.set_mount_point("/images", config.image_dir.string());

        http.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        http.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", config.cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        });
        http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            const char* code = res.status == 404 ? "not-found" : "http-error";
            res.set_content(api::error_body(code, httplib::status_message(res.status)).dump(), "application/json");
            return httplib::Server::HandlerResponse::Handled;
        });
        http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            res.status = 500;
            res.set_content(api::error_body("internal", what).dump(), "application/json");
        });
    }
};

Server::Server(ServerConfig config, std::shared_ptr<const CollectionIndex> index) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->index = std::move(index);
    impl_->install();
}

Server::~Server() {
    stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

void Server::start() {
    auto& http = impl_->http;
    const auto& cfg = impl_->config;
    if (cfg.port == 0) {
        impl_->bound_port = http.bind_to_any_port(cfg.host);
    } else {
        impl_->bound_port = http.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
    }
    if (impl_->bound_port <= 0) {
        throw Error(ErrorCode::port_in_use, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
    }
    impl_->worker = std::thread([&http] { http.listen_after_bind(); });
    http.wait_until_ready();
}

void Server::wait() {
    if (impl_->worker.joinable()) impl_->worker.join();
}

void Server::stop() { impl_->http.stop(); }

int Server::port() const noexcept { return impl_->bound_port; }

void Server::replace_index(std::shared_ptr<const CollectionIndex> index) {
    std::lock_guard lock(impl_->index_mutex);
    impl_->index = std::move(index);
}

std::shared_ptr<const CollectionIndex> Server::index() const { return impl_->snapshot(); }

}  // namespace atelier
