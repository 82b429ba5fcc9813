#include "sentipred/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sentipred/csv.hpp"

namespace sentipred {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error(where + ": not a number: '" + s + "'");
    return v;
}

}  // namespace

std::string to_string(MissingPolicy p) {
    switch (p) {
        case MissingPolicy::neutral: return "neutral";
        case MissingPolicy::carry_forward: return "carry_forward";
        case MissingPolicy::leave_missing: return "leave_missing";
    }
    throw std::runtime_error("invalid missing policy value");
}

MissingPolicy missing_policy_from_string(const std::string& s) {
    if (s == "neutral") return MissingPolicy::neutral;
    if (s == "carry_forward") return MissingPolicy::carry_forward;
    if (s == "leave_missing") return MissingPolicy::leave_missing;
    throw std::runtime_error("unknown missing policy '" + s +
                             "' (expected neutral, carry_forward, or leave_missing)");
}

bool comment_correct(Label label, Date day, const std::vector<MarketBar>& bars) {
    if (label == Label::unlabeled)
        throw std::runtime_error("comment_correct: comment is unlabeled");
    const auto here = std::find_if(bars.begin(), bars.end(),
                                   [&](const MarketBar& b) { return b.date == day; });
    if (here == bars.end())
        throw std::runtime_error("comment_correct: no close for " + format_date(day));
    const auto next = here + 1;
    if (next == bars.end())
        throw std::runtime_error("comment_correct: no close after " + format_date(day));
    if (label == Label::bullish) return next->close > here->close;
    return next->close < here->close;
}

TrustTable compute_trust(const DailyBuckets& buckets, const std::vector<MarketBar>& bars,
                         Date window_start, Date window_end, double default_tc) {
    if (window_end < window_start)
        throw std::runtime_error("compute_trust: empty window (" + format_date(window_start) +
                                 " after " + format_date(window_end) + ")");

    struct UserDay {
        int correct = 0;
        int total = 0;
    };
    struct CrowdDay {
        int correct = 0;
        int total = 0;
        std::map<std::string, UserDay> users;
    };
    std::map<Date, CrowdDay> days;
    std::map<std::string, long long> comment_totals;
    bool any_day = false;

    for (const auto& [date, comments] : buckets.buckets) {
        if (date < window_start || window_end < date) continue;
        any_day = true;
        for (const Comment& c : comments) {
            const bool ok = comment_correct(c.label, date, bars);
            CrowdDay& crowd = days[date];
            crowd.total += 1;
            crowd.correct += ok ? 1 : 0;
            UserDay& u = crowd.users[c.user];
            u.total += 1;
            u.correct += ok ? 1 : 0;
            comment_totals[c.user] += 1;
        }
    }
    if (!any_day)
        throw std::runtime_error("compute_trust: no trading day with comments inside window " +
                                 format_date(window_start) + ".." + format_date(window_end));

    TrustTable table;
    table.stock_symbol = "";
    table.default_tc = default_tc;
    table.window_start = window_start;
    table.window_end = window_end;

    double total_comments = 0.0;
    for (const auto& [user, n] : comment_totals) total_comments += static_cast<double>(n);
    table.avg_comment_count = total_comments / static_cast<double>(comment_totals.size());

    std::map<std::string, std::pair<double, int>> sums;  // user -> (ratio sum, active days)
    for (const auto& [date, crowd] : days) {
        if (crowd.correct == 0) continue;  // crowd accuracy undefined, day skipped
        const double crowd_inverse =
            static_cast<double>(crowd.total) / static_cast<double>(crowd.correct);
        for (const auto& [user, u] : crowd.users) {
            const double user_accuracy =
                static_cast<double>(u.correct) / static_cast<double>(u.total);
            auto& [sum, n] = sums[user];
            sum += user_accuracy * crowd_inverse;
            n += 1;
        }
    }
    for (const auto& [user, acc] : sums) {
        if (static_cast<double>(comment_totals.at(user)) <= table.avg_comment_count)
            continue;  // low-activity users resolve to the default
        if (acc.second == 0) continue;
        table.coefficients[user] = acc.first / static_cast<double>(acc.second);
    }
    return table;
}

std::vector<DailyIndicatorRow> compute_daily_indices(
    const DailyBuckets& buckets, const std::map<std::string, ClassifiedComment>& classes,
    const TrustTable& trust, MissingPolicy policy) {
    std::vector<DailyIndicatorRow> rows;
    rows.reserve(buckets.calendar.size());

    double carry1 = 0.5, carry2 = 0.5, carry3 = 0.5, carry4 = 0.5;
    const double nan = std::nan("");

    for (Date date : buckets.calendar) {
        DailyIndicatorRow row;
        row.date = date;

        int bull = 0, bear = 0;
        double tc_bull = 0.0, tc_bear = 0.0;
        double score_bull = 0.0, score_bear = 0.0;
        double score_tc_bull = 0.0, score_tc_bear = 0.0;

        auto it = buckets.buckets.find(date);
        if (it != buckets.buckets.end()) {
            for (const Comment& c : it->second) {
                row.comment_count += 1;
                row.count_with_likes += 1 + c.likes;
                auto cls = classes.find(c.id);
                if (cls == classes.end() || cls->second.label == Label::unlabeled) continue;
                const double tc = trust.tc(c.user);
                const double magnitude = std::fabs(cls->second.score);
                if (cls->second.label == Label::bullish) {
                    bull += 1;
                    tc_bull += tc;
                    score_bull += magnitude;
                    score_tc_bull += magnitude * tc;
                } else {
                    bear += 1;
                    tc_bear += tc;
                    score_bear += magnitude;
                    score_tc_bear += magnitude * tc;
                }
            }
        }
        row.bullish_count = bull;
        row.bearish_count = bear;

        auto ratio = [&](double num, double den, double& carry) {
            std::pair<double, bool> out;  // value, missing
            if (den > 0.0) {
                out = {num / den, false};
                carry = out.first;
            } else {
                switch (policy) {
                    case MissingPolicy::neutral: out = {0.5, true}; break;
                    case MissingPolicy::carry_forward: out = {carry, true}; break;
                    case MissingPolicy::leave_missing: out = {nan, true}; break;
                }
            }
            return out;
        };

        const auto [i1, m1] = ratio(static_cast<double>(bull), static_cast<double>(bull + bear),
                                    carry1);
        const auto [i2, m2] = ratio(tc_bull, tc_bull + tc_bear, carry2);
        const auto [i3, m3] = ratio(score_bull, score_bull + score_bear, carry3);
        const auto [i4, m4] = ratio(score_tc_bull, score_tc_bull + score_tc_bear, carry4);
        row.index1 = i1;
        row.index2 = i2;
        row.index3 = i3;
        row.index4 = i4;
        row.missing = m1 || m2 || m3 || m4;
        rows.push_back(row);
    }
    return rows;
}

void save_indicators_csv(const std::vector<DailyIndicatorRow>& rows, const std::string& path,
                         const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (!provenance.empty()) out << "# " << provenance << '\n';
    out << "date,index1,index2,index3,index4,count,count_with_likes,bullish,bearish,"
           "missing_flag\n";
    for (const DailyIndicatorRow& r : rows) {
        out << format_date(r.date) << ',' << format_double(r.index1) << ','
            << format_double(r.index2) << ',' << format_double(r.index3) << ','
            << format_double(r.index4) << ',' << r.comment_count << ',' << r.count_with_likes
            << ',' << r.bullish_count << ',' << r.bearish_count << ',' << (r.missing ? 1 : 0)
            << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<DailyIndicatorRow> load_indicators_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open indicator file '" + path + "'");
    csv::Reader reader(in, /*skip_comments=*/true);
    auto header = reader.next();
    if (!header || header->size() != 10 || (*header)[0] != "date")
        throw std::runtime_error(path + ": bad indicator header");
    std::vector<DailyIndicatorRow> rows;
    while (auto rec = reader.next()) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (rec->size() != 10) throw std::runtime_error(where + ": expected 10 fields");
        DailyIndicatorRow r;
        r.date = parse_date((*rec)[0]);
        r.index1 = parse_double((*rec)[1], where);
        r.index2 = parse_double((*rec)[2], where);
        r.index3 = parse_double((*rec)[3], where);
        r.index4 = parse_double((*rec)[4], where);
        r.comment_count = static_cast<int>(parse_double((*rec)[5], where));
        r.count_with_likes = static_cast<long long>(parse_double((*rec)[6], where));
        r.bullish_count = static_cast<int>(parse_double((*rec)[7], where));
        r.bearish_count = static_cast<int>(parse_double((*rec)[8], where));
        r.missing = (*rec)[9] == "1";
        rows.push_back(r);
    }
    return rows;
}

}  // namespace sentipred
