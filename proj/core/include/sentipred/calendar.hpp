#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sentipred {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    std::int32_t days = 0;

    auto operator<=>(const Date&) const = default;

    Date next() const { return Date{days + 1}; }
};

/// Instant stored as seconds since the Unix epoch, UTC.
struct DateTime {
    std::int64_t seconds = 0;

    auto operator<=>(const DateTime&) const = default;
};

/// Minutes past local midnight, e.g. 12:30 -> 750.
struct TimeOfDay {
    int minutes = 0;

    auto operator<=>(const TimeOfDay&) const = default;
};

Date make_date(int year, int month, int day);
void civil_from_date(Date d, int& year, int& month, int& day);

/// Parses "YYYY-MM-DD". Throws std::runtime_error on malformed input.
Date parse_date(std::string_view s);
std::string format_date(Date d);

/// Parses "HH:MM". Throws on malformed input or out-of-range values.
TimeOfDay parse_time_of_day(std::string_view s);
std::string format_time_of_day(TimeOfDay t);

/// Parses an ISO-8601 timestamp: "YYYY-MM-DD[T ]HH:MM[:SS][Z|±HH:MM]" or a
/// bare date (midnight). A timestamp without an explicit offset is taken to
/// be local time at `default_offset_minutes` east of UTC and converted.
DateTime parse_datetime(std::string_view s, int default_offset_minutes = 0);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_datetime(DateTime t);

/// Calendar date of `t` shifted `offset_minutes` east of UTC.
Date local_date(DateTime t, int offset_minutes);
/// Time of day of `t` shifted `offset_minutes` east of UTC.
TimeOfDay local_time_of_day(DateTime t, int offset_minutes);

}  // namespace sentipred
