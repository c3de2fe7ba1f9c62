#include <gtest/gtest.h>

#include <thread>

#include "atelier/harvest.hpp"
#include "atelier/net.hpp"
#include "atelier/text.hpp"
#include "schema.hpp"
#include "stub_server.hpp"

using namespace atelier;
using namespace std::chrono_literals;
using atelier::testing::StubReply;
using atelier::testing::StubServer;

namespace {

std::filesystem::path adapter_path(const std::string& name) {
    return std::filesystem::path(ATELIER_SOURCE_DIR) / "adapters" / (name + ".yaml");
}

std::string page(const std::string& rel) {
    return read_file(atelier::testing::fixture_dir() / "html" / rel);
}

std::string field(const harvest::RawRecord& r, std::string_view key) {
    const auto* v = r.get(key);
    return v ? *v : "<absent>";
}

}  // namespace

TEST(Adapters, ShippedAdaptersLoad) {
    harvest::AdapterRegistry registry;
    for (const auto* name : {"ushmm", "joods", "niod"}) registry.add(harvest::SiteAdapter::load(adapter_path(name)));
    EXPECT_EQ(registry.size(), 3u);
    EXPECT_EQ(registry.find("joods")->source, Source::JOODS);
    EXPECT_EQ(registry.find("nope"), nullptr);
    try {
        registry.add(harvest::SiteAdapter::load(adapter_path("niod")));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::adapter_invalid);
    }
}

TEST(Adapters, InvalidDefinitions) {
    const std::vector<std::pair<std::string, ErrorCode>> cases = {
        {"name: x\nsource: USHMM\nrecord_selector: div\nfields: {}\n", ErrorCode::adapter_invalid},
        {"source: USHMM\nrecord_selector: div\nfields: {t: h1}\n", ErrorCode::adapter_invalid},
        {"name: x\nsource: Louvre\nrecord_selector: div\nfields: {t: h1}\n", ErrorCode::adapter_invalid},
        {"name: x\nsource: USHMM\nrecord_selector: 'div:first-child'\nfields: {t: h1}\n",
         ErrorCode::adapter_selector_invalid},
        {"name: x\nsource: USHMM\nrecord_selector: div\nfields: {t: 'h1 + h2'}\n", ErrorCode::adapter_selector_invalid},
        {"name: x\nsource: USHMM\nrecord_selector: div\nfields: {t: h1}\nmapping: {t: colour}\n",
         ErrorCode::adapter_invalid},
        {"name: x\nsource: USHMM\nbase_url: 'not a url'\nrecord_selector: div\nfields: {t: h1}\n",
         ErrorCode::adapter_invalid},
        {"[unbalanced", ErrorCode::adapter_invalid},
    };
    for (const auto& [yaml, code] : cases) {
        try {
            harvest::SiteAdapter::parse(yaml);
            ADD_FAILURE() << "accepted: " << yaml;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code) << yaml << " -> " << e.what();
        }
    }
}

TEST(Adapters, AttributeSuffixParsing) {
    const auto a = harvest::SiteAdapter::parse(
        "name: x\nsource: NIOD\nrecord_selector: div\nfields:\n  link: a@href\n  kind: 'span[data-x=\"a@b\"]'\n");
    ASSERT_EQ(a.fields.size(), 2u);
    EXPECT_EQ(a.fields[0].attribute, "href");
    EXPECT_FALSE(a.fields[1].attribute);
    EXPECT_EQ(a.mapping.at("title"), "title");
}

TEST(Extract, UshmmFixturePages) {
    const auto adapter = harvest::SiteAdapter::load(adapter_path("ushmm"));
    const auto p1 = harvest::extract_records(page("ushmm/page-1.html"), adapter, "https://collections.example.org/search/page-1.html");
    ASSERT_EQ(p1.size(), 3u);  // the script and comment decoys are not records
    EXPECT_EQ(field(p1[0], "title"), "Barracks at dusk");
    EXPECT_EQ(field(p1[0], "creator"), "Leo Haas");
    EXPECT_EQ(field(p1[0], "date"), "ca. 1943-1944");
    EXPECT_EQ(field(p1[0], "rights"), "Gift of the artist's family");
    EXPECT_EQ(field(p1[0], "link"), "../object/1001");
    EXPECT_EQ(field(p1[1], "creator"), "<absent>");
    EXPECT_EQ(field(p1[1], "rights"), "<absent>");
    EXPECT_EQ(field(p1[1], "place"), "Westerbork,");
    EXPECT_EQ(field(p1[2], "title"), "Roll call & inspection");
    EXPECT_EQ(p1[2].origin_url, "https://collections.example.org/search/page-1.html#3");

    const auto p2 = harvest::extract_records(page("ushmm/page-2.html"), adapter, "p2");
    ASSERT_EQ(p2.size(), 2u);
    EXPECT_EQ(field(p2[0], "title"), "Transport");
    EXPECT_EQ(field(p2[0], "date"), "1941/1942");
    EXPECT_EQ(field(p2[1], "title"), "Sketch of the camp kitchen verso: study of hands");
    EXPECT_EQ(field(p2[1], "image"), "/media/ushmm-1005.jpg?size=large");
}

TEST(Extract, JoodsAndNiodFixtures) {
    const auto joods = harvest::SiteAdapter::load(adapter_path("joods"));
    const auto j = harvest::extract_records(page("joods/catalogue.html"), joods, "j");
    ASSERT_EQ(j.size(), 4u);
    EXPECT_EQ(field(j[0], "id"), "JCK-2001");
    EXPECT_EQ(field(j[0], "vervaardiger"), "Jo Spier");
    EXPECT_EQ(field(j[1], "datering"), "1943\xE2\x80\x93" "1944");
    EXPECT_EQ(field(j[2], "vervaardiger"), "<absent>");
    EXPECT_EQ(field(j[3], "rights"), "\xC2\xA9 Joods Cultureel Kwartier");

    const auto niod = harvest::SiteAdapter::load(adapter_path("niod"));
    const auto n = harvest::extract_records(page("niod/beeldbank.html"), niod, "n");
    ASSERT_EQ(n.size(), 3u);
    EXPECT_EQ(field(n[0], "location_type"), "camp");
    EXPECT_EQ(field(n[1], "maker"), "<absent>");
    EXPECT_EQ(field(n[1], "location_type"), "city");
    EXPECT_EQ(n[2].origin_url, "n#3");
}

TEST(Extract, EmptyRecordsDroppedButCounted) {
    const auto a = harvest::SiteAdapter::parse("name: x\nsource: OTHER\nrecord_selector: li\nfields: {title: b}\n");
    const auto recs = harvest::extract_records("<ul><li><b>one</b><li>nothing<li><b> </b><li><b>four</b></ul>", a, "u");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[1].origin_url, "u#4");
}

TEST(Transform, MappingResolutionAndIds) {
    const auto adapter = harvest::SiteAdapter::load(adapter_path("ushmm"));
    const auto recs = harvest::extract_records(page("ushmm/page-2.html"), adapter, "https://collections.example.org/search/page-2.html");
    const auto t = harvest::transform(recs[1], adapter.source, adapter.mapping, adapter.base_url);
    EXPECT_TRUE(t.issues.empty());
    EXPECT_EQ(t.draft.id, harvest::synthesize_id(Source::USHMM, "https://collections.example.org/search/page-2.html#2"));
    EXPECT_EQ(t.draft.source, "USHMM");
    EXPECT_EQ(t.draft.image_path, "ushmm-1005.jpg");
    EXPECT_EQ(t.draft.source_url, "https://collections.example.org/object/1005");
    EXPECT_EQ(t.draft.year, "undated");

    const auto t0 = harvest::transform(recs[0], adapter.source, adapter.mapping, adapter.base_url);
    EXPECT_EQ(t0.draft.source_url, "https://collections.example.org/object/1004");
}

TEST(Transform, UnmappedAndOverridingFields) {
    harvest::RawRecord raw;
    raw.origin_url = "o#1";
    raw.fields = {{"title", "A"}, {"colour", "red"}, {"name", "B"}};
    harvest::FieldMapping mapping = harvest::default_mapping();
    mapping["name"] = "title";
    const auto t = harvest::transform(raw, Source::NIOD, mapping);
    EXPECT_EQ(t.draft.title, "B");
    ASSERT_EQ(t.issues.size(), 2u);
    EXPECT_EQ(t.issues[0].message, "unmapped field: colour");
    EXPECT_EQ(t.issues[1].field, "title");
}

TEST(Transform, SynthesizedIdsMatchFnvOracle) {
    const auto oracle = atelier::testing::load_json(atelier::testing::fixture_dir() / "oracles" / "fnv_ids.json");
    ASSERT_GE(oracle["cases"].size(), 8u);
    for (const auto& c : oracle["cases"]) {
        const auto source = source_from_string(c["source"].get<std::string>());
        ASSERT_TRUE(source);
        EXPECT_EQ(harvest::synthesize_id(*source, c["origin_url"].get<std::string>()), c["id"].get<std::string>());
    }
}

TEST(Url, ParseAndResolve) {
    const auto u = net::parse_url("https://Example.org:8443/a/b?q=1#frag");
    ASSERT_TRUE(u);
    EXPECT_EQ(u->port, 8443);
    EXPECT_EQ(u->target, "/a/b?q=1");
    EXPECT_EQ(net::parse_url("http://[::1]/x")->host, "::1");
    EXPECT_EQ(net::parse_url("http://[::1]:81/x")->origin(), "http://[::1]:81");
    EXPECT_EQ(net::resolve_url("http://[::1]/a/b", "c"), "http://[::1]/a/c");
    EXPECT_EQ(net::parse_url("http://example.org")->target, "/");
    EXPECT_FALSE(net::parse_url("ftp://example.org/"));
    EXPECT_FALSE(net::parse_url("http://"));
    EXPECT_FALSE(net::parse_url("example.org/x"));
    EXPECT_EQ(net::resolve_url("https://e.org/a/b/c.html", "../d"), "https://e.org/a/d");
    EXPECT_EQ(net::resolve_url("https://e.org/a/b/c.html", "/root"), "https://e.org/root");
    EXPECT_EQ(net::resolve_url("https://e.org/a/b/c.html", "x.jpg?s=1"), "https://e.org/a/b/x.jpg?s=1");
    EXPECT_EQ(net::resolve_url("https://e.org/a/", "https://other.net/z"), "https://other.net/z");
    EXPECT_EQ(net::resolve_url("https://e.org/a/", "//cdn.e.org/i.png"), "https://cdn.e.org/i.png");
    EXPECT_EQ(net::percent_encode("a b/\xC3\xBC"), "a%20b%2F%C3%BC");
}

TEST(RateGate, SpacingMeasuredFromCompletion) {
    net::RateGate gate(150ms);
    std::chrono::steady_clock::time_point released;
    {
        auto pass = gate.acquire("k");
        std::this_thread::sleep_for(80ms);
        released = std::chrono::steady_clock::now();
    }
    auto pass = gate.acquire("k");
    EXPECT_GE(std::chrono::steady_clock::now() - released, 150ms);
    const auto t = std::chrono::steady_clock::now();
    auto other = gate.acquire("other-key");
    EXPECT_LT(std::chrono::steady_clock::now() - t, 100ms);
}

TEST(RateGate, SerializesConcurrentAcquirers) {
    net::RateGate gate(40ms);
    std::mutex m;
    std::vector<std::pair<std::chrono::steady_clock::time_point, std::chrono::steady_clock::time_point>> spans;
    std::vector<std::thread> threads;
    for (int i = 0; i < 5; ++i) {
        threads.emplace_back([&] {
            auto pass = gate.acquire("k");
            const auto start = std::chrono::steady_clock::now();
            std::this_thread::sleep_for(5ms);
            std::lock_guard lock(m);
            spans.emplace_back(start, std::chrono::steady_clock::now());
        });
    }
    for (auto& t : threads) t.join();
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) EXPECT_GE(spans[i].first - spans[i - 1].second, 40ms);
}

TEST(Fetch, PolitenessDelayBetweenRequests) {
    StubServer stub;
    stub.on("/page", StubReply{200, "<html></html>", "text/html"});
    harvest::Politeness p;
    p.delay = 200ms;
    for (int i = 0; i < 3; ++i) EXPECT_EQ(harvest::fetch_page(stub.url("/page"), p).status, 200);
    const auto log = stub.requests();
    ASSERT_EQ(log.size(), 3u);
    for (std::size_t i = 1; i < log.size(); ++i) EXPECT_GE(log[i].received - log[i - 1].received, 200ms);
}

TEST(Fetch, RetriesTransientFailures) {
    StubServer stub;
    int calls = 0;
    stub.on("/flaky", [&](const auto&) { return ++calls <= 2 ? StubReply{503, "busy"} : StubReply{200, "ok"}; });
    stub.on("/missing", StubReply{404, "no"});
    stub.on("/down", StubReply{500, "err"});
    harvest::Politeness p;
    p.delay = 5ms;
    const auto ok = harvest::fetch_page(stub.url("/flaky"), p);
    EXPECT_EQ(ok.status, 200);
    EXPECT_EQ(ok.body, "ok");
    EXPECT_EQ(stub.request_count("/flaky"), 3u);
    EXPECT_EQ(harvest::fetch_page(stub.url("/missing"), p).status, 404);
    EXPECT_EQ(stub.request_count("/missing"), 1u);
    p.max_retries = 2;
    EXPECT_EQ(harvest::fetch_page(stub.url("/down"), p).status, 500);
    EXPECT_EQ(stub.request_count("/down"), 3u);
}

TEST(Fetch, InvalidAndUnreachable) {
    try {
        harvest::fetch_page("notaurl");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_url);
    }
    int closed_port = 0;
    {
        StubServer stub;
        closed_port = stub.port();
    }
    harvest::Politeness p;
    p.delay = 1ms;
    p.max_retries = 1;
    p.timeout = 500ms;
    try {
        harvest::fetch_page("http://127.0.0.1:" + std::to_string(closed_port) + "/", p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::network_unreachable);
    }
    p.max_retries = -1;
    try {
        harvest::fetch_page("http://127.0.0.1/", p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_config);
    }
}
