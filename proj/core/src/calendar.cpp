#include "sentipred/calendar.hpp"

#include <cstdio>
#include <stdexcept>

namespace sentipred {

namespace {

// Howard Hinnant's civil-date algorithms (chrono-compatible, proleptic Gregorian).
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& y, int& m, int& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        if (pos + i >= s.size() || !is_digit(s[pos + i]))
            throw std::runtime_error("malformed date/time: '" + std::string(s) + "'");
        v = v * 10 + (s[pos + i] - '0');
    }
    return v;
}

int days_in_month(int year, int month) {
    static const int k[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return k[month - 1];
}

}  // namespace

Date make_date(int year, int month, int day) { return Date{days_from_civil(year, month, day)}; }

void civil_from_date(Date d, int& year, int& month, int& day) {
    civil_from_days(d.days, year, month, day);
}

Date parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw std::runtime_error("malformed date: '" + std::string(s) + "' (expected YYYY-MM-DD)");
    const int y = parse_fixed_int(s, 0, 4);
    const int m = parse_fixed_int(s, 5, 2);
    const int d = parse_fixed_int(s, 8, 2);
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m))
        throw std::runtime_error("invalid calendar date: '" + std::string(s) + "'");
    return make_date(y, m, d);
}

std::string format_date(Date d) {
    int y, m, day;
    civil_from_date(d, y, m, day);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, day);
    return buf;
}

TimeOfDay parse_time_of_day(std::string_view s) {
    if (s.size() != 5 || s[2] != ':')
        throw std::runtime_error("malformed time of day: '" + std::string(s) + "' (expected HH:MM)");
    const int h = parse_fixed_int(s, 0, 2);
    const int m = parse_fixed_int(s, 3, 2);
    if (h > 23 || m > 59)
        throw std::runtime_error("time of day out of range: '" + std::string(s) + "'");
    return TimeOfDay{h * 60 + m};
}

std::string format_time_of_day(TimeOfDay t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", t.minutes / 60, t.minutes % 60);
    return buf;
}

DateTime parse_datetime(std::string_view s, int default_offset_minutes) {
    if (s.size() == 10) {
        const Date d = parse_date(s);
        return DateTime{std::int64_t(d.days) * 86400 - std::int64_t(default_offset_minutes) * 60};
    }
    if (s.size() < 16 || (s[10] != 'T' && s[10] != ' '))
        throw std::runtime_error("malformed timestamp: '" + std::string(s) + "'");
    const Date d = parse_date(s.substr(0, 10));
    const int hour = parse_fixed_int(s, 11, 2);
    if (s[13] != ':') throw std::runtime_error("malformed timestamp: '" + std::string(s) + "'");
    const int minute = parse_fixed_int(s, 14, 2);
    if (hour > 23 || minute > 59)
        throw std::runtime_error("timestamp time out of range: '" + std::string(s) + "'");
    std::size_t pos = 16;
    int second = 0;
    if (pos < s.size() && s[pos] == ':') {
        second = parse_fixed_int(s, pos + 1, 2);
        if (second > 60) throw std::runtime_error("timestamp seconds out of range: '" + std::string(s) + "'");
        pos += 3;
    }
    int offset_minutes = default_offset_minutes;
    if (pos < s.size()) {
        const char c = s[pos];
        if (c == 'Z' && pos + 1 == s.size()) {
            offset_minutes = 0;
        } else if ((c == '+' || c == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
            const int oh = parse_fixed_int(s, pos + 1, 2);
            const int om = parse_fixed_int(s, pos + 4, 2);
            offset_minutes = (oh * 60 + om) * (c == '-' ? -1 : 1);
        } else {
            throw std::runtime_error("malformed timestamp offset: '" + std::string(s) + "'");
        }
    }
    const std::int64_t local = std::int64_t(d.days) * 86400 + hour * 3600 + minute * 60 + second;
    return DateTime{local - std::int64_t(offset_minutes) * 60};
}

std::string format_datetime(DateTime t) {
    std::int64_t days = t.seconds / 86400;
    std::int64_t sod = t.seconds % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(static_cast<std::int32_t>(days), y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(sod / 3600), static_cast<int>((sod / 60) % 60),
                  static_cast<int>(sod % 60));
    return buf;
}

Date local_date(DateTime t, int offset_minutes) {
    std::int64_t shifted = t.seconds + std::int64_t(offset_minutes) * 60;
    std::int64_t days = shifted / 86400;
    if (shifted % 86400 < 0) days -= 1;
    return Date{static_cast<std::int32_t>(days)};
}

TimeOfDay local_time_of_day(DateTime t, int offset_minutes) {
    std::int64_t shifted = t.seconds + std::int64_t(offset_minutes) * 60;
    std::int64_t sod = shifted % 86400;
    if (sod < 0) sod += 86400;
    return TimeOfDay{static_cast<int>(sod / 60)};
}

}  // namespace sentipred
