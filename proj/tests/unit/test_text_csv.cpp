#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "atelier/csv.hpp"
#include "atelier/error.hpp"
#include "atelier/text.hpp"

using namespace atelier;

TEST(Text, TrimAndCollapse) {
    EXPECT_EQ(text::trim("  a b \t\n"), "a b");
    EXPECT_EQ(text::collapse_whitespace("  a \t\n  b  "), "a b");
    EXPECT_EQ(text::collapse_whitespace(""), "");
    EXPECT_TRUE(text::iequals("Westerbork", "WESTERBORK"));
    EXPECT_FALSE(text::iequals("Westerbork", "Westerbor"));
}

TEST(Text, Utf8Validation) {
    EXPECT_TRUE(text::is_valid_utf8("Z\xC3\xBCrich"));
    EXPECT_FALSE(text::is_valid_utf8("\xC3"));
    EXPECT_FALSE(text::is_valid_utf8("\xC0\xAF"));        // overlong
    EXPECT_FALSE(text::is_valid_utf8("\xED\xA0\x80"));    // surrogate
    EXPECT_FALSE(text::is_valid_utf8("\xF4\x90\x80\x80")); // above U+10FFFF
    std::string s;
    text::append_utf8(s, 0x1F600);
    EXPECT_EQ(s, "\xF0\x9F\x98\x80");
}

TEST(Text, Fnv1aKnownVectors) {
    EXPECT_EQ(text::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(text::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(text::hex64(0xabcULL), "0000000000000abc");
    EXPECT_EQ(text::parse_hex64("0000000000000abc"), 0xabcULL);
    EXPECT_FALSE(text::parse_hex64("0000000000000ABC"));
    EXPECT_FALSE(text::parse_hex64("abc"));
}

TEST(Text, DoubleFormattingRoundTrips) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double v = i % 2 ? dist(rng) : std::ldexp(dist(rng), -40);
        const auto back = text::parse_double(text::format_double(v));
        ASSERT_TRUE(back);
        ASSERT_EQ(*back, v);
    }
    EXPECT_EQ(text::format_double(0.1 + 0.2), "0.30000000000000004");
    EXPECT_EQ(text::format_double(52.0), "52");
    EXPECT_FALSE(text::parse_double("inf"));
    EXPECT_FALSE(text::parse_double("nan"));
    EXPECT_FALSE(text::parse_double("1.5x"));
    EXPECT_FALSE(text::parse_double(""));
    EXPECT_EQ(text::parse_int("-12"), -12);
    EXPECT_FALSE(text::parse_int("12.0"));
    EXPECT_FALSE(text::parse_int("99999999999"));
}

TEST(Csv, QuotingAndLineEndings) {
    const auto rows = csv::parse("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\n\n\"multi\nline\",\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"x,1", "say \"hi\""}));
    EXPECT_EQ(rows[2].fields, (std::vector<std::string>{"multi\nline", ""}));
    EXPECT_EQ(rows[0].number, 1u);
    EXPECT_EQ(rows[2].number, 3u);
}

TEST(Csv, ByteOrderMarkIgnored) {
    const auto rows = csv::parse("\xEF\xBB\xBFid\n1\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].fields.front(), "id");
}

TEST(Csv, UnterminatedQuoteThrows) {
    try {
        csv::parse("a\n\"open\n");
        FAIL() << "expected malformed_csv";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::malformed_csv);
    }
}

TEST(Csv, EscapeRoundTrip) {
    const std::vector<std::string> cells = {"", "plain", "a,b", "q\"q", "line\nbreak", "cr\r", " spaced "};
    std::string out;
    csv::append_row(out, cells);
    const auto rows = csv::parse(out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].fields, cells);
    EXPECT_EQ(csv::escape("plain"), "plain");
}

TEST(Csv, HeaderValidation) {
    const std::array<std::string_view, 2> expected = {"id", "name"};
    const csv::Header h(csv::parse("name,id\n")[0], expected);
    const auto row = csv::parse("n,i\n")[0];
    EXPECT_EQ(h.get(row, "id"), "i");
    try {
        csv::Header(csv::parse("id\n")[0], expected);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::missing_header);
        EXPECT_NE(std::string(e.what()).find("name"), std::string::npos);
    }
    try {
        csv::Header(csv::parse("id,name,extra\n")[0], expected);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unexpected_header);
    }
    try {
        csv::Header(csv::parse("id,name,id\n")[0], expected);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unexpected_header);
    }
}

TEST(Csv, InvalidUtf8Throws) {
    try {
        csv::parse_utf8("id\n\xFF\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_utf8);
    }
}

TEST(Error, IssueFormatting) {
    EXPECT_EQ((Issue{3, "year", "bad"}).to_string(), "row 3: year: bad");
    EXPECT_EQ((Issue{0, "year", "bad"}).to_string(), "year: bad");
}
