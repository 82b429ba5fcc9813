#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentipred/ingest.hpp"

namespace sentipred {

/// Per (user, stock) reliability coefficients with a population default.
struct TrustTable {
    std::string stock_symbol;
    std::map<std::string, double> coefficients;  // user -> TC, only above-average users
    double default_tc = 0.5;
    Date window_start;
    Date window_end;
    double avg_comment_count = 0.0;

    double tc(const std::string& user) const {
        auto it = coefficients.find(user);
        return it == coefficients.end() ? default_tc : it->second;
    }
};

/// True iff the comment called the next session's direction: bullish with a
/// rising close or bearish with a falling one. A flat close counts as
/// incorrect for both. Throws when the comment is unlabeled or the next
/// trading day's close is missing.
bool comment_correct(Label label, Date day, const std::vector<MarketBar>& bars);

/// Trust coefficient per user: the average, over the user's active days in
/// the window, of (user daily accuracy) x (crowd daily accuracy)^-1. Days on
/// which the crowd got nothing right are skipped. Users whose comment total
/// does not exceed the population average fall back to default_tc and are
/// not stored. Labels must be present (gold or classifier output).
TrustTable compute_trust(const DailyBuckets& buckets, const std::vector<MarketBar>& bars,
                         Date window_start, Date window_end, double default_tc = 0.5);

/// Classification outcome attached to a comment for index computation.
struct ClassifiedComment {
    Label label = Label::unlabeled;
    double score = 0.0;  // Eq. 3 comment score
};

enum class MissingPolicy { neutral, carry_forward, leave_missing };

std::string to_string(MissingPolicy p);
MissingPolicy missing_policy_from_string(const std::string& s);

/// Daily sentiment indices and volume features for one stock.
struct DailyIndicatorRow {
    Date date;
    double index1 = 0.0;  // bullish count ratio
    double index2 = 0.0;  // trust-weighted count ratio
    double index3 = 0.0;  // |score| mass ratio
    double index4 = 0.0;  // trust-weighted |score| mass ratio
    int comment_count = 0;
    long long count_with_likes = 0;
    int bullish_count = 0;
    int bearish_count = 0;
    bool missing = false;  // no classified comment that day (indices filled by policy)
};

/// Computes Index1..Index4 per trading day over the bucket calendar, plus
/// the volume features. Score mass uses |comment score| within each class so
/// every index stays in [0, 1]. Days without classified comments (or with
/// zero score mass for the score indices) follow `policy` and keep the
/// missing flag. `classes` maps comment id -> classification outcome.
std::vector<DailyIndicatorRow> compute_daily_indices(
    const DailyBuckets& buckets, const std::map<std::string, ClassifiedComment>& classes,
    const TrustTable& trust, MissingPolicy policy = MissingPolicy::neutral);

/// CSV: date,index1,index2,index3,index4,count,count_with_likes,bullish,bearish,missing_flag
void save_indicators_csv(const std::vector<DailyIndicatorRow>& rows, const std::string& path,
                         const std::string& provenance = "");
std::vector<DailyIndicatorRow> load_indicators_csv(const std::string& path);

}  // namespace sentipred
