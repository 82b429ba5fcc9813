#include <doctest.h>

#include <algorithm>
#include <string>

#include "helpers.hpp"
#include "sentipred/ingest.hpp"

using namespace sentipred;
using testutil::TempDir;
using testutil::write_file;

namespace {

const char* kHeader = "id,timestamp,user,text,label,likes\n";

CommentCorpus corpus_from_csv(const std::string& body) {
    TempDir dir("ingest");
    const std::string path = dir.file("comments.csv");
    write_file(path, std::string(kHeader) + body);
    return load_comments(path, CommentFormat::csv, "test");
}

std::vector<MarketBar> market_from_csv(const std::string& body) {
    TempDir dir("market");
    const std::string path = dir.file("market.csv");
    write_file(path, "date,close\n" + body);
    return load_market(path);
}

}  // namespace

TEST_CASE("load_comments parses, validates, and sorts") {
    const auto corpus = corpus_from_csv(
        "c2,2016-05-02T10:00:00Z,ali,\"second, with comma\",bearish,3\n"
        "c1,2016-05-01T10:00:00Z,sara,first,bullish,0\n"
        "c3,2016-05-03T10:00:00Z,ali,\"with \"\"quotes\"\"\",none,1\n");
    REQUIRE(corpus.comments.size() == 3);
    CHECK(corpus.comments[0].id == "c1");  // sorted by timestamp
    CHECK(corpus.comments[1].text == "second, with comma");
    CHECK(corpus.comments[2].text == "with \"quotes\"");
    CHECK(corpus.comments[0].label == Label::bullish);
    CHECK(corpus.comments[1].label == Label::bearish);
    CHECK(corpus.comments[2].label == Label::unlabeled);
}

TEST_CASE("label counts are preserved exactly on a balanced 4250-row file") {
    std::string body;
    auto add_rows = [&](const char* prefix, const char* label, int n) {
        for (int i = 0; i < n; ++i) {
            char ts[40];
            std::snprintf(ts, sizeof ts, "2016-05-%02dT%02d:%02d:%02dZ", 1 + i / 3600,
                          (i / 3600) % 24, (i / 60) % 60, i % 60);
            body += std::string(prefix) + std::to_string(i) + "," + ts + ",u,text," + label +
                    ",0\n";
        }
    };
    add_rows("b", "bullish", 2125);
    add_rows("r", "bearish", 2125);
    const auto corpus = corpus_from_csv(body);
    REQUIRE(corpus.comments.size() == 4250);
    int bull = 0, bear = 0;
    for (const auto& c : corpus.comments) {
        if (c.label == Label::bullish) ++bull;
        if (c.label == Label::bearish) ++bear;
    }
    CHECK(bull == 2125);
    CHECK(bear == 2125);
}

TEST_CASE("empty file yields empty corpus") {
    CHECK(corpus_from_csv("").comments.empty());
}

TEST_CASE("malformed rows name the line and field") {
    CHECK_THROWS_WITH_AS(corpus_from_csv("c1,not-a-time,u,text,bullish,0\n"),
                         doctest::Contains("timestamp"), std::runtime_error);
    CHECK_THROWS_WITH_AS(corpus_from_csv("c1,2016-05-01T10:00:00Z,u,text,very_bullish,0\n"),
                         doctest::Contains("label"), std::runtime_error);
    CHECK_THROWS_WITH_AS(corpus_from_csv("c1,2016-05-01T10:00:00Z,u,text,bullish,-1\n"),
                         doctest::Contains("likes"), std::runtime_error);
    CHECK_THROWS_WITH_AS(corpus_from_csv("c1,2016-05-01T10:00:00Z,u,   ,bullish,0\n"),
                         doctest::Contains("text"), std::runtime_error);
    CHECK_THROWS_WITH_AS(corpus_from_csv("c1,2016-05-01T10:00:00Z,u,text,bullish,0\n"
                                         "c1,2016-05-02T10:00:00Z,u,text,bearish,0\n"),
                         doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("jsonl loading matches the csv schema") {
    TempDir dir("jsonl");
    const std::string path = dir.file("comments.jsonl");
    write_file(path,
               R"({"id":"a","timestamp":"2016-05-01T10:00:00Z","user":"u","text":"hi","label":"bullish","likes":2})"
               "\n"
               R"({"id":"b","timestamp":"2016-05-01T11:00:00Z","user":"v","text":"lo","label":"none","likes":0})"
               "\n");
    const auto corpus = load_comments(path, CommentFormat::jsonl, "test");
    REQUIRE(corpus.comments.size() == 2);
    CHECK(corpus.comments[0].likes == 2);
    CHECK(corpus.comments[1].label == Label::unlabeled);
}

TEST_CASE("corpus csv round-trip preserves all fields") {
    const auto corpus = corpus_from_csv(
        "c1,2016-05-01T10:00:00+03:30,ali,\"multi\nline, text\",bullish,7\n"
        "c2,2016-05-02T10:00:00Z,sara,\"quote \"\"x\"\"\",none,0\n");
    TempDir dir("roundtrip");
    const std::string path = dir.file("copy.csv");
    save_comments_csv(corpus, path);
    const auto again = load_comments(path, CommentFormat::csv, "test");
    REQUIRE(again.comments.size() == corpus.comments.size());
    for (std::size_t i = 0; i < corpus.comments.size(); ++i) {
        CHECK(again.comments[i].id == corpus.comments[i].id);
        CHECK(again.comments[i].timestamp == corpus.comments[i].timestamp);
        CHECK(again.comments[i].user == corpus.comments[i].user);
        CHECK(again.comments[i].text == corpus.comments[i].text);
        CHECK(again.comments[i].label == corpus.comments[i].label);
        CHECK(again.comments[i].likes == corpus.comments[i].likes);
    }
}

TEST_CASE("load_market validates closes and date order") {
    const auto bars = market_from_csv("2016-05-01,1000\n2016-05-02,1020\n");
    REQUIRE(bars.size() == 2);
    CHECK(bars[1].close == doctest::Approx(1020.0));

    CHECK_THROWS_WITH_AS(market_from_csv("2016-05-01,1000\n2016-05-01,1020\n"),
                         doctest::Contains("duplicate date 2016-05-01"), std::runtime_error);
    CHECK_THROWS_WITH_AS(market_from_csv("2016-05-01,0\n"), doctest::Contains("positive"),
                         std::runtime_error);
    CHECK_THROWS(market_from_csv("2016-05-02,1000\n2016-05-01,999\n"));
}

namespace {

Comment make_comment(const std::string& id, const std::string& ts) {
    Comment c;
    c.id = id;
    c.timestamp = parse_datetime(ts);
    c.user = "u";
    c.text = "t";
    c.label = Label::bullish;
    return c;
}

std::vector<MarketBar> week_bars() {
    // Mon..Thu plus following Mon (gap over the weekend)
    return {{parse_date("2016-05-02"), 100.0},
            {parse_date("2016-05-03"), 101.0},
            {parse_date("2016-05-04"), 102.0},
            {parse_date("2016-05-05"), 103.0},
            {parse_date("2016-05-09"), 104.0}};
}

}  // namespace

TEST_CASE("bucketing maps before-cutoff comments to the same day") {
    CommentCorpus corpus;
    corpus.comments = {make_comment("a", "2016-05-02T09:00:00+03:30")};
    const auto buckets =
        bucket_by_trading_day(corpus, week_bars(), parse_time_of_day("12:30"), 210);
    REQUIRE(buckets.buckets.count(parse_date("2016-05-02")) == 1);
    CHECK(buckets.buckets.at(parse_date("2016-05-02")).size() == 1);
}

TEST_CASE("after-cutoff and non-trading-day comments roll forward") {
    CommentCorpus corpus;
    corpus.comments = {make_comment("late", "2016-05-02T15:00:00+03:30"),
                       make_comment("weekend", "2016-05-07T10:00:00+03:30")};
    const auto buckets =
        bucket_by_trading_day(corpus, week_bars(), parse_time_of_day("12:30"), 210);
    CHECK(buckets.buckets.at(parse_date("2016-05-03")).size() == 1);  // late -> next session
    CHECK(buckets.buckets.at(parse_date("2016-05-09")).size() == 1);  // weekend -> next session
}

TEST_CASE("bucketing conserves every comment under any cutoff") {
    CommentCorpus corpus;
    corpus.comments = {make_comment("a", "2016-05-02T09:00:00+03:30"),
                       make_comment("b", "2016-05-02T14:00:00+03:30"),
                       make_comment("c", "2016-05-03T09:00:00+03:30"),
                       make_comment("d", "2016-05-04T23:59:00+03:30")};
    for (const char* cutoff : {"00:00", "09:00", "12:30", "18:45", "23:59"}) {
        const auto buckets =
            bucket_by_trading_day(corpus, week_bars(), parse_time_of_day(cutoff), 210);
        CHECK(buckets.total_comments() == corpus.comments.size());
        for (const auto& [date, comments] : buckets.buckets) {
            CHECK(std::find(buckets.calendar.begin(), buckets.calendar.end(), date) !=
                  buckets.calendar.end());
        }
    }
}

TEST_CASE("comments past the last trading day are orphans") {
    CommentCorpus corpus;
    corpus.comments = {make_comment("x", "2016-05-10T09:00:00+03:30")};
    CHECK_THROWS_WITH_AS(
        bucket_by_trading_day(corpus, week_bars(), parse_time_of_day("12:30"), 210),
        doctest::Contains("x"), std::runtime_error);
}

TEST_CASE("shifting timestamps by one day shifts buckets by one trading date") {
    // Gap-free calendar so a calendar day equals a trading day.
    std::vector<MarketBar> bars;
    for (int i = 0; i < 10; ++i) bars.push_back({Date{parse_date("2016-05-02").days + i}, 100.0});

    CommentCorpus corpus;
    for (int i = 0; i < 12; ++i) {
        auto c = make_comment("c" + std::to_string(i), "2016-05-02T08:00:00+03:30");
        c.timestamp.seconds += i * 7901 + (i % 3) * 3600 * 5;  // scatter within the range
        corpus.comments.push_back(c);
    }
    const auto cutoff = parse_time_of_day("12:30");
    const auto before = bucket_by_trading_day(corpus, bars, cutoff, 210);

    CommentCorpus shifted = corpus;
    for (auto& c : shifted.comments) c.timestamp.seconds += 86400;
    const auto after = bucket_by_trading_day(shifted, bars, cutoff, 210);

    for (const auto& [date, comments] : before.buckets) {
        const Date next{date.days + 1};
        REQUIRE(after.buckets.count(next) == 1);
        CHECK(after.buckets.at(next).size() == comments.size());
    }
}
