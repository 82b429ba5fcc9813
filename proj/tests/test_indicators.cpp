#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sentipred/indicators.hpp"

using namespace sentipred;

namespace {

Comment make_comment(const std::string& id, const std::string& user, Label label,
                     int likes = 0) {
    Comment c;
    c.id = id;
    c.user = user;
    c.text = "t";
    c.label = label;
    c.likes = likes;
    return c;
}

std::vector<MarketBar> bars_from(const std::vector<double>& closes, int first_day = 0) {
    std::vector<MarketBar> bars;
    for (std::size_t i = 0; i < closes.size(); ++i)
        bars.push_back({Date{static_cast<std::int32_t>(first_day + i)}, closes[i]});
    return bars;
}

}  // namespace

TEST_CASE("comment correctness follows next-day direction") {
    const auto bars = bars_from({100.0, 102.0, 102.0, 99.0});
    CHECK(comment_correct(Label::bullish, Date{0}, bars));        // 100 -> 102
    CHECK_FALSE(comment_correct(Label::bearish, Date{0}, bars));  // rose
    CHECK_FALSE(comment_correct(Label::bullish, Date{1}, bars));  // flat close
    CHECK_FALSE(comment_correct(Label::bearish, Date{1}, bars));  // flat close
    CHECK(comment_correct(Label::bearish, Date{2}, bars));        // 102 -> 99
    CHECK_THROWS(comment_correct(Label::bullish, Date{3}, bars));   // no next close
    CHECK_THROWS(comment_correct(Label::unlabeled, Date{0}, bars));
    CHECK_THROWS(comment_correct(Label::bullish, Date{77}, bars));  // unknown day
}

TEST_CASE("trust: always-right user against a half-right crowd earns 2.0") {
    // Hand-computed two-day scenario. Each day has 4 comments, exactly 2 of
    // them correct, and one of the correct ones belongs to "ace": the crowd
    // is half right while ace is always right, so each day contributes
    // (1/1) * (4/2) = 2. Fillers are one-day users so ace's two comments
    // exceed the population average of 8/7.
    const auto bars = bars_from({100.0, 110.0, 120.0, 130.0});
    DailyBuckets buckets;
    buckets.calendar = {Date{0}, Date{1}};
    for (int day = 0; day < 2; ++day) {
        std::vector<Comment> cs;
        const std::string d = std::to_string(day);
        cs.push_back(make_comment("ace" + d, "ace", Label::bullish));          // correct
        cs.push_back(make_comment("g1" + d, "good" + d, Label::bullish));      // correct
        cs.push_back(make_comment("w1" + d, "wrong1_" + d, Label::bearish));   // wrong
        cs.push_back(make_comment("w2" + d, "wrong2_" + d, Label::bearish));   // wrong
        buckets.buckets[Date{day}] = cs;
    }
    const TrustTable table = compute_trust(buckets, bars, Date{0}, Date{1}, 0.5);
    CHECK(table.tc("ace") == 2.0);  // exact
    // one-day fillers sit at or below the average comment count -> default
    CHECK(table.tc("good0") == 0.5);
    CHECK(table.tc("nobody") == 0.5);
    CHECK(table.avg_comment_count == doctest::Approx(8.0 / 7.0));
}

TEST_CASE("trust: user matching crowd accuracy exactly earns 1.0") {
    const auto bars = bars_from({100.0, 110.0, 120.0});
    DailyBuckets buckets;
    buckets.calendar = {Date{0}, Date{1}};
    for (int day = 0; day < 2; ++day) {
        std::vector<Comment> cs;
        const std::string d = std::to_string(day);
        // "solo" posts 2 comments: one right, one wrong; crowd is solo plus
        // one low-activity user per day with matching accuracy.
        cs.push_back(make_comment("s_good" + d, "solo", Label::bullish));
        cs.push_back(make_comment("s_bad" + d, "solo", Label::bearish));
        cs.push_back(make_comment("x_good" + d, "other" + d, Label::bullish));
        cs.push_back(make_comment("x_bad" + d, "other" + d, Label::bearish));
        buckets.buckets[Date{day}] = cs;
    }
    // user accuracy 1/2 each day; crowd accuracy 2/4 -> ratio exactly 1.0
    const TrustTable table = compute_trust(buckets, bars, Date{0}, Date{1}, 0.5);
    CHECK(table.tc("solo") == 1.0);
}

TEST_CASE("trust skips days the crowd got entirely wrong") {
    const auto bars = bars_from({100.0, 110.0, 120.0, 130.0});
    DailyBuckets buckets;
    buckets.calendar = {Date{0}, Date{1}};
    buckets.buckets[Date{0}] = {make_comment("a0", "a", Label::bearish),   // wrong
                                make_comment("b0", "b", Label::bearish)};  // wrong
    buckets.buckets[Date{1}] = {make_comment("a1", "a", Label::bullish),
                                make_comment("a2", "a", Label::bullish),
                                make_comment("b1", "b", Label::bearish)};
    // day 0 skipped (crowd 0 correct); day 1: a = 2/2 vs crowd 2/3
    const TrustTable table = compute_trust(buckets, bars, Date{0}, Date{1}, 0.5);
    CHECK(table.tc("a") == doctest::Approx(1.5).epsilon(1e-12));  // (2/2)*(3/2)
    CHECK(table.tc("b") == 0.5);  // 2 comments <= average 2.5 -> default
}

TEST_CASE("an always-wrong active user earns a stored zero coefficient") {
    const auto bars = bars_from({100.0, 110.0, 120.0});
    DailyBuckets buckets;
    buckets.calendar = {Date{0}, Date{1}};
    for (int day = 0; day < 2; ++day) {
        const std::string d = std::to_string(day);
        buckets.buckets[Date{day}] = {
            make_comment("w1" + d, "always_wrong", Label::bearish),  // price rises
            make_comment("w2" + d, "always_wrong", Label::bearish),
            make_comment("ok" + d, "one_day" + d, Label::bullish)};
    }
    const TrustTable table = compute_trust(buckets, bars, Date{0}, Date{1}, 0.5);
    // 4 comments vs population average 6/3 = 2 -> stored, and the stored
    // value is the formula's own 0 (never remapped to the default)
    CHECK(table.coefficients.count("always_wrong") == 1);
    CHECK(table.tc("always_wrong") == 0.0);
}

TEST_CASE("empty trust window is an error") {
    const auto bars = bars_from({100.0, 110.0});
    DailyBuckets buckets;
    buckets.calendar = {Date{0}};
    buckets.buckets[Date{0}] = {make_comment("a", "a", Label::bullish)};
    CHECK_THROWS(compute_trust(buckets, bars, Date{1}, Date{0}, 0.5));
    CHECK_THROWS(compute_trust(buckets, bars, Date{5}, Date{9}, 0.5));
}

namespace {

DailyBuckets one_day_bucket(const std::vector<Comment>& comments) {
    DailyBuckets buckets;
    buckets.calendar = {Date{0}};
    buckets.buckets[Date{0}] = comments;
    return buckets;
}

std::map<std::string, ClassifiedComment> classes_of(const std::vector<Comment>& comments,
                                                    const std::vector<double>& scores) {
    std::map<std::string, ClassifiedComment> m;
    for (std::size_t i = 0; i < comments.size(); ++i)
        m[comments[i].id] = {comments[i].label, scores[i]};
    return m;
}

}  // namespace

TEST_CASE("index1 is the plain bullish ratio") {
    const std::vector<Comment> cs = {
        make_comment("a", "u1", Label::bullish), make_comment("b", "u2", Label::bullish),
        make_comment("c", "u3", Label::bullish), make_comment("d", "u4", Label::bearish)};
    TrustTable trust;
    const auto rows = compute_daily_indices(one_day_bucket(cs),
                                            classes_of(cs, {1, 1, 1, 1}), trust);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].index1 == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rows[0].bullish_count == 3);
    CHECK(rows[0].bearish_count == 1);
    CHECK_FALSE(rows[0].missing);
}

TEST_CASE("index3 weighs comments by score magnitude") {
    const std::vector<Comment> cs = {make_comment("a", "u1", Label::bullish),
                                     make_comment("b", "u2", Label::bullish),
                                     make_comment("c", "u3", Label::bearish)};
    TrustTable trust;
    const auto rows = compute_daily_indices(one_day_bucket(cs),
                                            classes_of(cs, {1.0, 3.0, -1.0}), trust);
    CHECK(rows[0].index3 == doctest::Approx(0.8).epsilon(1e-15));  // 4 / 5
}

TEST_CASE("equal trust collapses index2 to index1 and index4 to index3 exactly") {
    std::mt19937_64 rng(515);
    std::normal_distribution<double> score(0.0, 2.0);
    for (double tc : {0.5, 1.0, 0.25, 2.0}) {
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<Comment> cs;
            std::vector<double> scores;
            const int n = 1 + static_cast<int>(rng() % 9);
            for (int i = 0; i < n; ++i) {
                const Label label = (rng() % 2) ? Label::bullish : Label::bearish;
                cs.push_back(make_comment("c" + std::to_string(i), "u" + std::to_string(i),
                                          label, static_cast<int>(rng() % 5)));
                scores.push_back(score(rng));
            }
            TrustTable trust;
            trust.default_tc = tc;  // every user resolves to the same constant
            const auto rows =
                compute_daily_indices(one_day_bucket(cs), classes_of(cs, scores), trust);
            REQUIRE(rows.size() == 1);
            if (!rows[0].missing) {
                CHECK(rows[0].index2 == rows[0].index1);  // bitwise
                CHECK(rows[0].index4 == rows[0].index3);  // bitwise
            }
            CHECK(rows[0].index1 >= 0.0);
            CHECK(rows[0].index1 <= 1.0);
            CHECK(rows[0].index4 >= 0.0);
            CHECK(rows[0].index4 <= 1.0);
        }
    }
}

TEST_CASE("all-bullish and all-bearish days pin every index") {
    const std::vector<Comment> bulls = {make_comment("a", "u", Label::bullish),
                                        make_comment("b", "v", Label::bullish)};
    TrustTable trust;
    auto rows = compute_daily_indices(one_day_bucket(bulls), classes_of(bulls, {1.0, 2.0}),
                                      trust);
    CHECK(rows[0].index1 == 1.0);
    CHECK(rows[0].index2 == 1.0);
    CHECK(rows[0].index3 == 1.0);
    CHECK(rows[0].index4 == 1.0);

    const std::vector<Comment> bears = {make_comment("a", "u", Label::bearish),
                                        make_comment("b", "v", Label::bearish)};
    rows = compute_daily_indices(one_day_bucket(bears), classes_of(bears, {-1.0, -2.0}), trust);
    CHECK(rows[0].index1 == 0.0);
    CHECK(rows[0].index2 == 0.0);
    CHECK(rows[0].index3 == 0.0);
    CHECK(rows[0].index4 == 0.0);
}

TEST_CASE("volume features count comments and likes") {
    const std::vector<Comment> cs = {make_comment("a", "u", Label::bullish, 5),
                                     make_comment("b", "v", Label::bearish, 2),
                                     make_comment("c", "w", Label::unlabeled, 1)};
    std::map<std::string, ClassifiedComment> classes;
    classes["a"] = {Label::bullish, 1.0};
    classes["b"] = {Label::bearish, -1.0};
    // "c" has no classification: counted in volume, not in the indices
    TrustTable trust;
    const auto rows = compute_daily_indices(one_day_bucket(cs), classes, trust);
    CHECK(rows[0].comment_count == 3);
    CHECK(rows[0].count_with_likes == 3 + 5 + 2 + 1);
    CHECK(rows[0].bullish_count == 1);
    CHECK(rows[0].bearish_count == 1);
}

TEST_CASE("missing-day policies fill or flag") {
    DailyBuckets buckets;
    buckets.calendar = {Date{0}, Date{1}, Date{2}};
    const std::vector<Comment> cs = {make_comment("a", "u", Label::bullish)};
    buckets.buckets[Date{0}] = cs;
    const auto classes = classes_of(cs, {1.0});
    TrustTable trust;

    auto rows = compute_daily_indices(buckets, classes, trust, MissingPolicy::neutral);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].index1 == 1.0);
    CHECK(rows[1].index1 == 0.5);
    CHECK(rows[1].missing);
    CHECK(rows[2].index1 == 0.5);

    rows = compute_daily_indices(buckets, classes, trust, MissingPolicy::carry_forward);
    CHECK(rows[1].index1 == 1.0);  // carried from day 0
    CHECK(rows[1].missing);

    rows = compute_daily_indices(buckets, classes, trust, MissingPolicy::leave_missing);
    CHECK(std::isnan(rows[1].index1));
    CHECK(rows[1].missing);
}

TEST_CASE("indicator csv round-trips") {
    DailyBuckets buckets;
    buckets.calendar = {Date{100}, Date{101}};
    const std::vector<Comment> cs = {make_comment("a", "u", Label::bullish, 3),
                                     make_comment("b", "v", Label::bearish, 0)};
    buckets.buckets[Date{100}] = cs;
    TrustTable trust;
    const auto rows = compute_daily_indices(buckets, classes_of(cs, {0.5, -0.25}), trust);

    testutil::TempDir dir("indicators");
    const std::string path = dir.file("ind.csv");
    save_indicators_csv(rows, path, "config_hash=deadbeef seed=1");
    const auto loaded = load_indicators_csv(path);
    REQUIRE(loaded.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(loaded[i].date == rows[i].date);
        CHECK(loaded[i].index1 == rows[i].index1);
        CHECK(loaded[i].index4 == rows[i].index4);
        CHECK(loaded[i].comment_count == rows[i].comment_count);
        CHECK(loaded[i].count_with_likes == rows[i].count_with_likes);
        CHECK(loaded[i].missing == rows[i].missing);
    }
}
