#include <gtest/gtest.h>

#include <sstream>

#include "atelier/cli.hpp"
#include "atelier/detections.hpp"
#include "atelier/image.hpp"
#include "atelier/ingest.hpp"
#include "atelier/server.hpp"
#include "generators.hpp"
#include "schema.hpp"
#include "temp_dir.hpp"

using namespace atelier;
namespace fs = std::filesystem;
using atelier::testing::TempDir;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "atelier");
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string source_path(const std::string& rel) { return (fs::path(ATELIER_SOURCE_DIR) / rel).string(); }

// Copies the HTML fixtures and writes one synthetic JPEG per catalogued
// image. JCK-2002.jpg is a recompressed copy of ushmm-1001.jpg, NIOD-3003.jpg
// is missing and stray.jpg belongs to no record.
void stage_inputs(const fs::path& root) {
    fs::copy(fs::path(ATELIER_SOURCE_DIR) / "tests" / "fixtures" / "html", root / "html", fs::copy_options::recursive);
    const std::vector<std::string> names = {"ushmm-1001", "ushmm-1002", "ushmm-1003", "ushmm-1004", "ushmm-1005",
                                            "JCK-2001",   "JCK-2003",   "JCK-2004",   "NIOD-3001",  "NIOD-3002",
                                            "stray"};
    std::uint64_t seed = 500;
    for (const auto& n : names) {
        write_file(root / "images" / (n + ".jpg"), encode_jpeg(atelier::testing::synthetic_painting(seed++), 92));
    }
    write_file(root / "images" / "JCK-2002.jpg", encode_jpeg(atelier::testing::synthetic_painting(500), 60));
}

// harvest x3, ingest, dedup, geocode, then stats over the result.
std::vector<Run> pipeline(const fs::path& root) {
    std::vector<Run> runs;
    for (const std::string site : {"ushmm", "joods", "niod"}) {
        runs.push_back(run({"harvest", "--adapter", source_path("adapters/" + site + ".yaml"), "--input-dir",
                            (root / "html" / site).string(), "--out", (root / ("raw-" + site + ".csv")).string()}));
    }
    runs.push_back(run({"ingest", "--in", (root / "raw-ushmm.csv").string(), "--in", (root / "raw-joods.csv").string(),
                        "--in", (root / "raw-niod.csv").string(), "--images", (root / "images").string(), "--out",
                        (root / "ingested.csv").string()}));
    runs.push_back(run({"dedup", "--in", (root / "ingested.csv").string(), "--images", (root / "images").string(),
                        "--threshold", "10", "--out", (root / "deduped.csv").string(), "--report",
                        (root / "dedup.csv").string()}));
    runs.push_back(run({"geocode", "--in", (root / "deduped.csv").string(), "--gazetteer",
                        source_path("data/gazetteer.csv"), "--out", (root / "data" / kMetadataFile).string(), "--cache",
                        (root / "geocache.csv").string()}));
    write_file(root / "data" / kDetectionsFile,
               "image_id,raw_label,confidence,ymin,xmin,ymax,xmax\n");
    runs.push_back(run({"stats", "--data", (root / "data").string()}));
    return runs;
}

}  // namespace

TEST(Cli, UsageErrors) {
    auto r = run({"paint"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("unknown subcommand 'paint'"), std::string::npos);
    EXPECT_NE(r.err.find("harvest"), std::string::npos);  // usage text lists subcommands
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"ingest", "--in", "x.csv"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"dedup", "--in", "a", "--images", "b", "--out", "c", "--threshold", "65"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"serve", "--data", "d", "--port", "70000"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"stats", "--bogus"}).code, cli::kExitUsage);
    auto help = run({"--help"});
    EXPECT_EQ(help.code, cli::kExitOk);
    EXPECT_NE(help.out.find("geocode"), std::string::npos);
}

TEST(Cli, DataErrorsExitOne) {
    TempDir dir;
    auto r = run({"stats", "--data", dir.path().string()});
    EXPECT_EQ(r.code, cli::kExitDataError);
    EXPECT_NE(r.err.find("metadata.csv"), std::string::npos);
    EXPECT_EQ(run({"ingest", "--in", (dir / "nope.csv").string(), "--images", dir.path().string(), "--out",
                   (dir / "o.csv").string()})
                  .code,
              cli::kExitDataError);
    EXPECT_EQ(run({"harvest", "--adapter", (dir / "missing.yaml").string(), "--out", (dir / "o.csv").string()}).code,
              cli::kExitDataError);
}

TEST(Cli, EnvironmentFallback) {
    TempDir dir;
    atelier::testing::write_collection(dir.path(), {}, {});
    ::setenv("ATELIER_DATA_DIR", dir.path().c_str(), 1);
    const auto r = run({"stats"});
    ::unsetenv("ATELIER_DATA_DIR");
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("images: 0"), std::string::npos);
}

TEST(Cli, StatsOnReferenceScaleCorpus) {
    TempDir dir;
    const auto corpus = atelier::testing::reference_corpus(3, 1939, 19377);
    atelier::testing::write_collection(dir.path(), corpus.records, corpus.detections);
    const auto r = run({"stats", "--data", dir.path().string()});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("images: 1939\n"), std::string::npos);
    EXPECT_NE(r.out.find("detections: 19377\n"), std::string::npos);
    EXPECT_NE(r.out.find("mean detections per image: 9.993295513\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("geocoded: " + std::to_string(corpus.n_geocoded) + "\n"), std::string::npos);
}

TEST(Cli, FullPipelineOnFixtures) {
    TempDir dir;
    stage_inputs(dir.path());
    const auto runs = pipeline(dir.path());
    for (const auto& r : runs) ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_EQ(runs[0].out, "pages: 2\nrecords: 5\n");
    EXPECT_EQ(runs[1].out, "pages: 1\nrecords: 4\n");
    EXPECT_EQ(runs[2].out, "pages: 1\nrecords: 3\n");
    EXPECT_EQ(runs[3].out, "rows: 12\nrecords: 11\nunmatched records: 1\nunmatched files: 1\n");
    EXPECT_NE(runs[3].err.find("unparseable year 'undated'"), std::string::npos) << runs[3].err;
    EXPECT_EQ(runs[4].out, "hashed: 11\nremoved: 1\nrecords: 10\n");
    const auto report = read_file(dir / "dedup.csv");
    EXPECT_NE(report.find(",JCK-2002,"), std::string::npos) << report;
    EXPECT_EQ(runs[5].out, "resolved: 10\nunresolved locations: 0\n") << runs[5].err;
    EXPECT_NE(runs[6].out.find("images: 10\n"), std::string::npos);
    EXPECT_NE(runs[6].out.find("geocoded: 10\n"), std::string::npos);

    const auto parsed = parse_metadata_csv(read_file(dir / "data" / kMetadataFile));
    EXPECT_TRUE(parsed.report.issues.empty());
    for (const auto& r : parsed.records) EXPECT_TRUE(r.phash.has_value()) << r.id;
}

TEST(Cli, PipelineIsByteIdenticalAcrossRuns) {
    TempDir a, b;
    stage_inputs(a.path());
    stage_inputs(b.path());
    const auto first = pipeline(a.path());
    const auto second = pipeline(b.path());
    const auto rerun = pipeline(a.path());  // same directory, outputs overwritten
    for (std::size_t i = 0; i < first.size(); ++i) {
        EXPECT_EQ(first[i].out, second[i].out);
        EXPECT_EQ(first[i].out, rerun[i].out);
    }
    for (const std::string f : {"raw-ushmm.csv", "raw-joods.csv", "raw-niod.csv", "ingested.csv", "deduped.csv",
                                "dedup.csv", "geocache.csv", "data/metadata.csv"}) {
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
    }
}
