#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentipred/calendar.hpp"

namespace sentipred {

enum class Label { bullish, bearish, unlabeled };

std::string to_string(Label label);
Label label_from_string(const std::string& s);

/// One forum post about a stock.
struct Comment {
    std::string id;
    DateTime timestamp;  // UTC
    std::string user;
    std::string text;
    Label label = Label::unlabeled;
    int likes = 0;
};

/// One market session: date and closing price.
struct MarketBar {
    Date date;
    double close = 0.0;
};

/// Validated comment corpus, sorted by timestamp, ids unique.
struct CommentCorpus {
    std::string stock_symbol;
    std::vector<Comment> comments;
};

/// Comments assigned to the trading day whose close they can inform.
struct DailyBuckets {
    std::vector<Date> calendar;              // trading dates, ascending
    std::map<Date, std::vector<Comment>> buckets;

    std::size_t total_comments() const;
};

enum class CommentFormat { csv, jsonl };

/// Loads and validates a comment file. CSV header:
/// id,timestamp,user,text,label,likes with label in {bullish,bearish,none};
/// JSONL carries one object per line with the same keys.
/// Timestamps without an explicit UTC offset are interpreted at
/// `input_utc_offset_minutes` east of UTC (default 210 = +03:30).
CommentCorpus load_comments(const std::string& path, CommentFormat format,
                            const std::string& stock_symbol = "",
                            int input_utc_offset_minutes = 210);

/// Writes a corpus back out in the canonical CSV schema. A non-empty
/// `provenance` becomes a leading '#' comment line.
void save_comments_csv(const CommentCorpus& corpus, const std::string& path,
                       const std::string& provenance = "");

/// Loads a market CSV with header date,close. Dates must be strictly
/// increasing and closes positive.
std::vector<MarketBar> load_market(const std::string& path);

void save_market_csv(const std::vector<MarketBar>& bars, const std::string& path,
                     const std::string& provenance = "");

/// Assigns every comment to a trading day: a comment posted up to `cutoff`
/// local time on trading date d informs d's close; later comments and
/// comments on non-trading days roll forward to the next trading date.
/// Throws if any comment rolls past the last trading date, listing the
/// orphaned ids. `market_utc_offset_minutes` positions the market's local
/// clock relative to the stored UTC timestamps.
DailyBuckets bucket_by_trading_day(const CommentCorpus& corpus,
                                   const std::vector<MarketBar>& bars,
                                   TimeOfDay cutoff,
                                   int market_utc_offset_minutes = 210);

}  // namespace sentipred
