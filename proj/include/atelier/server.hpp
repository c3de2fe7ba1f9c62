#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "atelier/error.hpp"
#include "atelier/model.hpp"
#include "atelier/query.hpp"

namespace atelier {

inline constexpr const char* kMetadataFile = "metadata.csv";
inline constexpr const char* kDetectionsFile = "detections.csv";

struct LoadedCollection {
    std::shared_ptr<const CollectionIndex> index;
    std::vector<std::string> warnings;  // dangling detections, raw-cap overruns
};

// Reads <data_dir>/metadata.csv and <data_dir>/detections.csv, checks that
// every image_path exists below image_dir (skipped when image_dir is empty)
// and builds the index. Any malformed row or missing image throws
// Error(data_load_failure) naming the file and row.
LoadedCollection load_collection(const std::filesystem::path& data_dir, const std::filesystem::path& image_dir,
                                 const DetectionFilterConfig& config = {});

struct ServerConfig {
    std::string host = "0.0.0.0";
    int port = 8000;  // 0 picks a free port
    std::filesystem::path image_dir;
    std::string cors_origin = "*";
    std::size_t threads = 32;
};

// JSON API over an immutable index. The index may be replaced while
// running; in-flight requests keep the snapshot they started with.
class Server {
public:
    Server(ServerConfig config, std::shared_ptr<const CollectionIndex> index);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds and starts serving on a background thread. Throws
    // Error(port_in_use).
    void start();
    // Blocks until stop() is called from another thread.
    void wait();
    void stop();

    int port() const noexcept;
    void replace_index(std::shared_ptr<const CollectionIndex> index);
    std::shared_ptr<const CollectionIndex> index() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace atelier
