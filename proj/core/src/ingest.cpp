#include "sentipred/ingest.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sentipred/csv.hpp"

namespace sentipred {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

int parse_likes(const std::string& s, const std::string& where) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        fail(where + ": field 'likes' must be a non-negative integer, got '" + s + "'");
    errno = 0;
    const long v = std::strtol(s.c_str(), nullptr, 10);
    if (errno != 0 || v > 1'000'000'000L) fail(where + ": field 'likes' out of range");
    return static_cast<int>(v);
}

Comment validate_comment(Comment c, const std::string& where) {
    if (c.id.empty()) fail(where + ": field 'id' is empty");
    if (trimmed(c.text).empty()) fail(where + ": field 'text' is empty after trimming");
    if (c.likes < 0) fail(where + ": field 'likes' is negative");
    return c;
}

void finalize_corpus(CommentCorpus& corpus) {
    std::stable_sort(corpus.comments.begin(), corpus.comments.end(),
                     [](const Comment& a, const Comment& b) { return a.timestamp < b.timestamp; });
    std::set<std::string> seen;
    for (const Comment& c : corpus.comments) {
        if (!seen.insert(c.id).second) fail("duplicate comment id '" + c.id + "'");
    }
}

}  // namespace

std::string to_string(Label label) {
    switch (label) {
        case Label::bullish: return "bullish";
        case Label::bearish: return "bearish";
        case Label::unlabeled: return "none";
    }
    fail("invalid label value");
}

Label label_from_string(const std::string& s) {
    if (s == "bullish") return Label::bullish;
    if (s == "bearish") return Label::bearish;
    if (s == "none" || s.empty()) return Label::unlabeled;
    fail("unknown label '" + s + "' (expected bullish, bearish, or none)");
}

std::size_t DailyBuckets::total_comments() const {
    std::size_t n = 0;
    for (const auto& [date, comments] : buckets) n += comments.size();
    return n;
}

CommentCorpus load_comments(const std::string& path, CommentFormat format,
                            const std::string& stock_symbol, int input_utc_offset_minutes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open comments file '" + path + "'");

    CommentCorpus corpus;
    corpus.stock_symbol = stock_symbol;

    if (format == CommentFormat::csv) {
        csv::Reader reader(in, /*skip_comments=*/true);
        auto header = reader.next();
        const std::vector<std::string> expected = {"id", "timestamp", "user",
                                                   "text", "label", "likes"};
        if (!header || *header != expected)
            fail(path + ": bad header, expected id,timestamp,user,text,label,likes");
        while (auto row = reader.next()) {
            const std::string where = path + ":" + std::to_string(reader.line_number());
            if (row->size() != 6)
                fail(where + ": expected 6 fields, got " + std::to_string(row->size()));
            Comment c;
            c.id = (*row)[0];
            try {
                c.timestamp = parse_datetime((*row)[1], input_utc_offset_minutes);
            } catch (const std::exception& e) {
                fail(where + ": field 'timestamp': " + e.what());
            }
            c.user = (*row)[2];
            c.text = (*row)[3];
            try {
                c.label = label_from_string((*row)[4]);
            } catch (const std::exception& e) {
                fail(where + ": field 'label': " + e.what());
            }
            c.likes = parse_likes((*row)[5], where);
            corpus.comments.push_back(validate_comment(std::move(c), where));
        }
    } else {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trimmed(line).empty()) continue;
            const std::string where = path + ":" + std::to_string(line_no);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const std::exception& e) {
                fail(where + ": malformed JSON: " + e.what());
            }
            Comment c;
            try {
                c.id = j.at("id").get<std::string>();
                c.timestamp = parse_datetime(j.at("timestamp").get<std::string>(),
                                             input_utc_offset_minutes);
                c.user = j.at("user").get<std::string>();
                c.text = j.at("text").get<std::string>();
                c.label = label_from_string(j.at("label").get<std::string>());
                c.likes = j.at("likes").get<int>();
            } catch (const std::exception& e) {
                fail(where + ": " + e.what());
            }
            corpus.comments.push_back(validate_comment(std::move(c), where));
        }
    }

    finalize_corpus(corpus);
    return corpus;
}

void save_comments_csv(const CommentCorpus& corpus, const std::string& path,
                       const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    if (!provenance.empty()) out << "# " << provenance << '\n';
    csv::write_record(out, {"id", "timestamp", "user", "text", "label", "likes"});
    for (const Comment& c : corpus.comments) {
        csv::write_record(out, {c.id, format_datetime(c.timestamp), c.user, c.text,
                                to_string(c.label), std::to_string(c.likes)});
    }
    if (!out) fail("write to '" + path + "' failed");
}

std::vector<MarketBar> load_market(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open market file '" + path + "'");
    csv::Reader reader(in, /*skip_comments=*/true);
    auto header = reader.next();
    if (!header || *header != std::vector<std::string>{"date", "close"})
        fail(path + ": bad header, expected date,close");

    std::vector<MarketBar> bars;
    while (auto row = reader.next()) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row->size() != 2)
            fail(where + ": expected 2 fields, got " + std::to_string(row->size()));
        MarketBar bar;
        try {
            bar.date = parse_date((*row)[0]);
        } catch (const std::exception& e) {
            fail(where + ": field 'date': " + e.what());
        }
        char* end = nullptr;
        bar.close = std::strtod((*row)[1].c_str(), &end);
        if (end == (*row)[1].c_str() || *end != '\0')
            fail(where + ": field 'close' is not a number: '" + (*row)[1] + "'");
        if (!(bar.close > 0.0))
            fail(where + ": close must be positive, got " + (*row)[1]);
        if (!bars.empty()) {
            if (bar.date == bars.back().date)
                fail(where + ": duplicate date " + format_date(bar.date));
            if (bar.date < bars.back().date)
                fail(where + ": dates must be strictly increasing, " + format_date(bar.date) +
                     " after " + format_date(bars.back().date));
        }
        bars.push_back(bar);
    }
    return bars;
}

void save_market_csv(const std::vector<MarketBar>& bars, const std::string& path,
                     const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    if (!provenance.empty()) out << "# " << provenance << '\n';
    out << "date,close\n";
    for (const MarketBar& b : bars) {
        std::ostringstream v;
        v.precision(17);
        v << b.close;
        out << format_date(b.date) << ',' << v.str() << '\n';
    }
    if (!out) fail("write to '" + path + "' failed");
}

DailyBuckets bucket_by_trading_day(const CommentCorpus& corpus,
                                   const std::vector<MarketBar>& bars, TimeOfDay cutoff,
                                   int market_utc_offset_minutes) {
    if (bars.empty()) fail("bucket_by_trading_day: market series is empty");

    DailyBuckets out;
    out.calendar.reserve(bars.size());
    std::set<Date> trading;
    for (const MarketBar& b : bars) {
        out.calendar.push_back(b.date);
        trading.insert(b.date);
    }
    const Date last = out.calendar.back();

    std::vector<std::string> orphans;
    for (const Comment& c : corpus.comments) {
        const Date d = local_date(c.timestamp, market_utc_offset_minutes);
        const TimeOfDay tod = local_time_of_day(c.timestamp, market_utc_offset_minutes);
        Date target;
        if (trading.count(d) && tod <= cutoff) {
            target = d;
        } else {
            auto it = trading.upper_bound(d);
            if (it == trading.end()) {
                orphans.push_back(c.id);
                continue;
            }
            target = *it;
        }
        if (target > last) {
            orphans.push_back(c.id);
            continue;
        }
        out.buckets[target].push_back(c);
    }

    if (!orphans.empty()) {
        std::string msg = "comments fall after the last trading date " + format_date(last) +
                          "; orphaned ids:";
        for (const std::string& id : orphans) msg += " " + id;
        fail(msg);
    }
    return out;
}

}  // namespace sentipred
