#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sentipred/calendar.hpp"

// Synthetic pipeline inputs: a labeled Persian comment corpus plus a market
// series whose return can carry a planted dependence on the previous day's
// count-with-likes.

namespace synth {

struct MarketPlan {
    int days = 60;
    double base_close = 1000.0;
    double mean_return = 0.02;
    double ar_coefficient = 0.4;
    double noise_sd = 0.004;
    // planted lag-1 effect of count-with-likes on the return (0 = none)
    double cwl_beta = 0.0;
};

struct CorpusPlan {
    int min_comments_per_day = 8;
    int max_comments_per_day = 28;
    int n_users = 25;
    double bullish_share = 0.55;
    int max_likes = 6;
};

struct Generated {
    std::string comments_csv;
    std::string market_csv;
    std::vector<double> closes;
    std::vector<long long> count_with_likes;  // per trading day
};

inline const std::vector<std::string>& bullish_templates() {
    static const std::vector<std::string> t = {
        "سهم عالیه +++",
        "صف خرید می‌شه فردا",
        "می‌ره بالا قیمت",
        "رشد خوب داره سهم",
        "بازار سبز است امروز",
        "سود عالی داره",
        "حمایت قوی داره سهم",
        "افزایش قیمت خوب",
    };
    return t;
}

inline const std::vector<std::string>& bearish_templates() {
    static const std::vector<std::string> t = {
        "می‌ریزه پایین ---",
        "صف فروش سنگین",
        "ضرر بد داره سهم",
        "ریزش منفی بازار",
        "نمی‌ره بالا دیگه",
        "کاهش قیمت بد",
        "مقاومت ضعیف است",
        "زیان عالی نیست",
    };
    return t;
}

/// Writes comments.csv and market.csv under `dir` and returns their paths
/// together with the generated series. All comments carry gold labels and
/// fall before the 12:30 cutoff of their trading day. Trading days are
/// consecutive calendar days starting 2016-05-01.
inline Generated generate(const testutil::TempDir& dir, std::uint64_t seed,
                          const MarketPlan& market, const CorpusPlan& corpus) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n_comments(corpus.min_comments_per_day,
                                                  corpus.max_comments_per_day);
    std::uniform_int_distribution<int> likes(0, corpus.max_likes);
    std::uniform_int_distribution<int> user(0, corpus.n_users - 1);
    std::uniform_int_distribution<int> minute(0, 3 * 60 - 1);  // 09:00..11:59 local
    std::bernoulli_distribution bullish(corpus.bullish_share);
    std::normal_distribution<double> noise(0.0, market.noise_sd);

    const sentipred::Date first = sentipred::parse_date("2016-05-01");

    Generated out;
    std::string comments = "id,timestamp,user,text,label,likes\n";
    std::vector<long long> cwl(market.days, 0);
    int comment_id = 0;
    for (int day = 0; day < market.days; ++day) {
        const int n = n_comments(rng);
        for (int i = 0; i < n; ++i) {
            const bool bull = bullish(rng);
            const auto& pool = bull ? bullish_templates() : bearish_templates();
            const std::string& text = pool[rng() % pool.size()];
            const int like_count = likes(rng);
            cwl[day] += 1 + like_count;
            const int m = minute(rng);
            char ts[40];
            std::snprintf(ts, sizeof ts, "%sT%02d:%02d:00+03:30",
                          sentipred::format_date(sentipred::Date{first.days + day}).c_str(),
                          9 + m / 60, m % 60);
            comments += "c" + std::to_string(comment_id++) + "," + ts + ",u" +
                        std::to_string(user(rng)) + "," + text + "," +
                        (bull ? "bullish" : "bearish") + "," + std::to_string(like_count) + "\n";
        }
    }

    // Returns: mean-reverting AR(1) around mean_return plus the planted
    // lag-1 count-with-likes effect (centered so the mean stays put).
    double cwl_mean = 0.0;
    for (long long v : cwl) cwl_mean += static_cast<double>(v);
    cwl_mean /= static_cast<double>(market.days);

    out.closes.resize(market.days);
    out.closes[0] = market.base_close;
    double prev_return = market.mean_return;
    std::string market_csv = "date,close\n";
    market_csv += sentipred::format_date(first) + "," + std::to_string(out.closes[0]) + "\n";
    for (int day = 1; day < market.days; ++day) {
        double r = market.mean_return +
                   market.ar_coefficient * (prev_return - market.mean_return) + noise(rng);
        r += market.cwl_beta * (static_cast<double>(cwl[day - 1]) - cwl_mean);
        out.closes[day] = out.closes[day - 1] * (1.0 + r);
        prev_return = r;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", out.closes[day]);
        market_csv += sentipred::format_date(sentipred::Date{first.days + day}) + "," + buf +
                      "\n";
    }

    out.comments_csv = dir.file("comments.csv");
    out.market_csv = dir.file("market.csv");
    out.count_with_likes = std::move(cwl);
    testutil::write_file(out.comments_csv, comments);
    testutil::write_file(out.market_csv, market_csv);
    return out;
}

}  // namespace synth
