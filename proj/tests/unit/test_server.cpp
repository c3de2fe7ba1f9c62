#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "atelier/api.hpp"
#include "atelier/detections.hpp"
#include "atelier/ingest.hpp"
#include "atelier/server.hpp"
#include "generators.hpp"
#include "schema.hpp"
#include "temp_dir.hpp"

using namespace atelier;
using atelier::testing::Schema;
using atelier::testing::TempDir;
using json = nlohmann::json;

namespace {

ServerConfig local_config(std::filesystem::path image_dir = {}) {
    ServerConfig c;
    c.host = "127.0.0.1";
    c.port = 0;
    c.image_dir = std::move(image_dir);
    c.threads = 8;
    return c;
}

Schema schema(const std::string& name) { return Schema::load(atelier::testing::schema_dir() / (name + ".json")); }

struct Fetched {
    int status = 0;
    json body;
    httplib::Headers headers;
};

Fetched get(int port, const std::string& path) {
    httplib::Client client("127.0.0.1", port);
    auto res = client.Get(path);
    if (!res) return {};
    Fetched f{res->status, json(), res->headers};
    f.body = json::parse(res->body, nullptr, false);
    return f;
}

std::string header(const Fetched& f, const std::string& key) {
    auto it = f.headers.find(key);
    return it == f.headers.end() ? std::string() : it->second;
}

}  // namespace

TEST(LoadCollection, ReadsAndReportsWarnings) {
    TempDir dir;
    std::vector<ArtworkRecord> records(2);
    records[0].id = "a";
    records[0].image_path = "a.jpg";
    records[1].id = "b";
    std::vector<DetectionRecord> rows(2);
    rows[0].image_id = "a";
    rows[0].raw_label = "Tree";
    rows[0].label = "tree";
    rows[0].confidence = 0.9;
    rows[1] = rows[0];
    rows[1].image_id = "ghost";
    atelier::testing::write_collection(dir.path(), records, rows);
    write_file(dir / "img/a.jpg", "x");
    const auto loaded = load_collection(dir.path(), dir / "img");
    EXPECT_EQ(loaded.index->size(), 2u);
    EXPECT_EQ(loaded.index->n_detections(), 1u);
    ASSERT_EQ(loaded.warnings.size(), 1u);
    EXPECT_NE(loaded.warnings[0].find("ghost"), std::string::npos);
}

TEST(LoadCollection, FailuresNameFileAndRow) {
    TempDir dir;
    auto expect_failure = [&](const std::string& needle) {
        try {
            load_collection(dir.path(), dir / "img");
            ADD_FAILURE() << "loaded";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::data_load_failure);
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_failure("metadata.csv");
    ArtworkRecord r;
    r.id = "a";
    r.image_path = "a.jpg";
    atelier::testing::write_collection(dir.path(), {r}, {});
    expect_failure("a.jpg");  // image missing
    write_file(dir / "img/a.jpg", "x");
    EXPECT_NO_THROW(load_collection(dir.path(), dir / "img"));
    write_file(dir / kDetectionsFile, "image_id,raw_label,confidence,ymin,xmin,ymax,xmax\na,Tree,2,0,0,1,1\n");
    expect_failure("row 2");
    write_file(dir / kDetectionsFile, "nonsense\n");
    expect_failure("detections.csv");
    std::filesystem::remove(dir / kDetectionsFile);
    expect_failure("detections.csv");
}

TEST(Server, EndpointsOverHttpValidate) {
    const auto index = atelier::testing::api_fixture_index();
    Server server(local_config(), index);
    server.start();
    const int port = server.port();
    ASSERT_GT(port, 0);

    auto h = get(port, "/api/health");
    EXPECT_EQ(h.status, 200);
    EXPECT_TRUE(schema("health").validate(h.body).empty());
    EXPECT_TRUE(schema("facets").validate(get(port, "/api/facets").body).empty());
    EXPECT_TRUE(schema("wordcloud").validate(get(port, "/api/wordcloud?top_n=5").body).empty());
    EXPECT_TRUE(schema("map").validate(get(port, "/api/map?source=NIOD").body).empty());
    auto a = get(port, "/api/artworks?artist=Leo%20Haas&seed=5");
    EXPECT_EQ(a.status, 200);
    EXPECT_TRUE(schema("artworks").validate(a.body).empty());
    EXPECT_EQ(a.body, api::artworks(*index, {{"artist", "Leo Haas"}, {"seed", "5"}}, [] { return 0; }).body);

    const auto& id = index->records()[3].id;
    auto d = get(port, "/api/artworks/" + id);
    EXPECT_EQ(d.status, 200);
    EXPECT_TRUE(schema("artwork").validate(d.body).empty());
    EXPECT_EQ(d.body, api::artwork(*index, id).body);

    for (const std::string path : {"/api/artworks/nope", "/api/nothing", "/api/artworks?page_size=0",
                                   "/api/artworks?source=Louvre", "/api/map?year_min=x"}) {
        auto e = get(port, path);
        EXPECT_GE(e.status, 400) << path;
        EXPECT_TRUE(schema("error").validate(e.body).empty()) << path << " " << e.body.dump();
    }
    EXPECT_EQ(get(port, "/api/artworks/nope").status, 404);
    EXPECT_EQ(get(port, "/api/artworks?page_size=0").status, 400);
    server.stop();
    server.wait();
}

TEST(Server, SeedIssuedWhenAbsentAndReusable) {
    const auto index = atelier::testing::api_fixture_index();
    Server server(local_config(), index);
    server.start();
    auto first = get(server.port(), "/api/artworks");
    ASSERT_EQ(first.status, 200);
    const auto seed = first.body["seed"].get<std::uint64_t>();
    EXPECT_LT(seed, std::uint64_t{1} << 53);
    auto again = get(server.port(), "/api/artworks?seed=" + std::to_string(seed));
    EXPECT_EQ(again.body["items"], first.body["items"]);
}

TEST(Server, CorsAndPreflight) {
    auto config = local_config();
    config.cors_origin = "http://localhost:5173";
    Server server(config, atelier::testing::api_fixture_index());
    server.start();
    auto h = get(server.port(), "/api/health");
    EXPECT_EQ(header(h, "Access-Control-Allow-Origin"), "http://localhost:5173");
    httplib::Client client("127.0.0.1", server.port());
    auto pre = client.Options("/api/artworks");
    ASSERT_TRUE(pre);
    EXPECT_EQ(pre->status, 204);
    EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
}

TEST(Server, ServesImages) {
    TempDir dir;
    write_file(dir / "a b.jpg", "JPEGDATA");
    Server server(local_config(dir.path()), atelier::testing::api_fixture_index());
    server.start();
    httplib::Client client("127.0.0.1", server.port());
    auto res = client.Get(api::image_url("a b.jpg"));
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, "JPEGDATA");
    EXPECT_EQ(client.Get("/images/missing.jpg")->status, 404);
}

TEST(Server, PortInUse) {
    Server first(local_config(), atelier::testing::api_fixture_index());
    first.start();
    auto config = local_config();
    config.port = first.port();
    Server second(config, atelier::testing::api_fixture_index());
    try {
        second.start();
        FAIL() << "second bind succeeded";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::port_in_use);
    }
}

TEST(Server, ReplaceIndexSwapsSnapshot) {
    Server server(local_config(), atelier::testing::api_fixture_index(11, 120));
    server.start();
    EXPECT_EQ(get(server.port(), "/api/health").body["n_images"], 120);
    server.replace_index(atelier::testing::api_fixture_index(12, 30));
    EXPECT_EQ(get(server.port(), "/api/health").body["n_images"], 30);
    EXPECT_EQ(server.index()->size(), 30u);
}

TEST(Server, ConcurrentClientsNoServerErrors) {
    Server server(local_config(), atelier::testing::api_fixture_index());
    server.start();
    std::atomic<int> server_errors{0}, failures{0}, ok{0};
    std::vector<std::thread> clients;
    for (int c = 0; c < 16; ++c) {
        clients.emplace_back([&, c] {
            httplib::Client client("127.0.0.1", server.port());
            const std::string paths[] = {"/api/artworks", "/api/facets", "/api/wordcloud", "/api/map",
                                         "/api/artworks?label=person&seed=" + std::to_string(c)};
            for (int i = 0; i < 20; ++i) {
                auto res = client.Get(paths[(c + i) % 5]);
                if (!res) {
                    ++failures;
                } else if (res->status >= 500) {
                    ++server_errors;
                } else {
                    ++ok;
                }
            }
        });
    }
    for (auto& t : clients) t.join();
    EXPECT_EQ(server_errors.load(), 0);
    EXPECT_EQ(failures.load(), 0);
    EXPECT_EQ(ok.load(), 16 * 20);
}
