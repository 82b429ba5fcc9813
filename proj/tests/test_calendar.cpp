#include <doctest.h>

#include "sentipred/calendar.hpp"

using namespace sentipred;

TEST_CASE("date round-trips through civil conversion") {
    const Date d = parse_date("2016-05-01");
    CHECK(format_date(d) == "2016-05-01");
    int y, m, day;
    civil_from_date(d, y, m, day);
    CHECK(y == 2016);
    CHECK(m == 5);
    CHECK(day == 1);
    CHECK(make_date(1970, 1, 1).days == 0);
    CHECK(make_date(1970, 1, 2).days == 1);
}

TEST_CASE("date parsing rejects malformed input") {
    CHECK_THROWS(parse_date("2016/05/01"));
    CHECK_THROWS(parse_date("2016-13-01"));
    CHECK_THROWS(parse_date("2016-02-30"));
    CHECK_THROWS(parse_date("16-05-01"));
    CHECK(parse_date("2016-02-29") == make_date(2016, 2, 29));  // leap year
    CHECK_THROWS(parse_date("2015-02-29"));
}

TEST_CASE("datetime parsing honors explicit offsets") {
    // 12:00 Tehran standard time = 08:30 UTC
    const DateTime t = parse_datetime("2016-05-01T12:00:00+03:30");
    CHECK(format_datetime(t) == "2016-05-01T08:30:00Z");
    CHECK(parse_datetime("2016-05-01T08:30:00Z") == t);
    // default offset applies only when none is given
    CHECK(parse_datetime("2016-05-01T12:00:00", 210) == t);
    CHECK(parse_datetime("2016-05-01 12:00", 210) == t);
    CHECK(parse_datetime("2016-05-01T12:00:00", 0) ==
          parse_datetime("2016-05-01T12:00:00Z"));
}

TEST_CASE("datetime parsing rejects malformed input") {
    CHECK_THROWS(parse_datetime("2016-05-01T25:00:00"));
    CHECK_THROWS(parse_datetime("2016-05-01T12"));
    CHECK_THROWS(parse_datetime("not a time"));
    CHECK_THROWS(parse_datetime("2016-05-01T12:00:00+3:30"));
}

TEST_CASE("local date and time of day shift with the offset") {
    const DateTime t = parse_datetime("2016-05-01T22:00:00Z");
    CHECK(local_date(t, 0) == parse_date("2016-05-01"));
    CHECK(local_date(t, 210) == parse_date("2016-05-02"));  // 01:30 next day in Tehran
    CHECK(local_time_of_day(t, 210).minutes == 90);
    CHECK(local_time_of_day(t, 0).minutes == 22 * 60);
}

TEST_CASE("time of day parses and formats") {
    CHECK(parse_time_of_day("12:30").minutes == 750);
    CHECK(format_time_of_day(TimeOfDay{750}) == "12:30");
    CHECK_THROWS(parse_time_of_day("24:00"));
    CHECK_THROWS(parse_time_of_day("1230"));
}
