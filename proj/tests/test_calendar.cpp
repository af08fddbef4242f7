#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>

#include "sectorlab/calendar.hpp"
#include "sectorlab/csv.hpp"

using namespace sectorlab;

namespace {

Date d(int y, unsigned m, unsigned day) { return Date::from_ymd(y, m, day); }

} // namespace

TEST_CASE("date parsing and arithmetic") {
    const Date x = Date::parse_iso("2015-01-01");
    CHECK(x.iso() == "2015-01-01");
    CHECK(x.weekday_iso() == 4); // Thursday
    CHECK(x.plus_days(1).iso() == "2015-01-02");
    CHECK(x.days_until(d(2015, 1, 31)) == 30);
    CHECK(d(2016, 2, 29).iso() == "2016-02-29");

    CHECK_THROWS_AS(Date::parse_iso("2015/01/01"), Error);
    CHECK_THROWS_AS(Date::parse_iso("2015-13-01"), Error);
    CHECK_THROWS_AS(Date::parse_iso("2015-02-30"), Error);
    CHECK_THROWS_AS(Date::parse_iso("not-a-date"), Error);
}

TEST_CASE("trading days over a plain week") {
    TradingCalendar cal;
    // 2016-06-06 is a Monday.
    auto days = trading_days(cal, d(2016, 6, 6), d(2016, 6, 12));
    CHECK(days.size() == 5);
    CHECK(days.front() == d(2016, 6, 6));
    CHECK(days.back() == d(2016, 6, 10));

    cal.holidays.insert(d(2016, 6, 8)); // Wednesday off
    days = trading_days(cal, d(2016, 6, 6), d(2016, 6, 12));
    CHECK(days.size() == 4);

    CHECK_THROWS_AS(trading_days(cal, d(2016, 6, 12), d(2016, 6, 6)), Error);
}

TEST_CASE("2015 has 252 trading days under the bundled holiday list") {
    const TradingCalendar cal = default_us_calendar();
    const auto days = trading_days(cal, d(2015, 1, 1), d(2015, 12, 31));
    CHECK(days.size() == 252);
}

TEST_CASE("third friday weekday arithmetic") {
    const TradingCalendar no_holidays;
    // July 2016 starts on a Friday -> third Friday is the 15th.
    auto sched = third_friday_schedule(no_holidays, d(2016, 7, 1), d(2016, 7, 31));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2016, 7, 15));

    // October 2016 starts on a Saturday -> third Friday is the 21st.
    sched = third_friday_schedule(no_holidays, d(2016, 10, 1), d(2016, 10, 31));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2016, 10, 21));
}

TEST_CASE("third friday rolls forward over a holiday") {
    TradingCalendar cal;
    cal.holidays.insert(d(2016, 7, 15));
    auto sched = third_friday_schedule(cal, d(2016, 7, 1), d(2016, 7, 31));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2016, 7, 18)); // following Monday

    // Real collision in the bundled list: Good Friday 2014-04-18 is the
    // third Friday of its month.
    const TradingCalendar us = default_us_calendar();
    sched = third_friday_schedule(us, d(2014, 4, 1), d(2014, 4, 30));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2014, 4, 21));
}

TEST_CASE("trigger that cannot stay in its month is skipped with a warning") {
    TradingCalendar cal;
    // Kill every weekday from the third Friday (2016-07-15) to month end.
    for (Date x = d(2016, 7, 15); x <= d(2016, 7, 31); x = x.plus_days(1)) {
        cal.holidays.insert(x);
    }
    std::vector<std::string> warnings;
    auto sched = third_friday_schedule(cal, d(2016, 7, 1), d(2016, 8, 31), &warnings);
    REQUIRE(sched.size() == 1); // only August survives
    CHECK(sched[0] == d(2016, 8, 19));
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("skipped") != std::string::npos);
}

TEST_CASE("first trading day of month") {
    const TradingCalendar us = default_us_calendar();
    // June 2016 starts on a Wednesday, no holiday.
    auto sched = first_trading_day_schedule(us, d(2016, 6, 1), d(2016, 6, 30));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2016, 6, 1));

    // October 2016 starts on a Saturday -> Monday the 3rd.
    sched = first_trading_day_schedule(us, d(2016, 10, 1), d(2016, 10, 31));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2016, 10, 3));

    // January 2018: New Year's Day is a Monday holiday -> the 2nd.
    sched = first_trading_day_schedule(us, d(2018, 1, 1), d(2018, 1, 31));
    REQUIRE(sched.size() == 1);
    CHECK(sched[0] == d(2018, 1, 2));
}

TEST_CASE("schedules for 2012-2017 match the independently enumerated fixture") {
    const TradingCalendar cal =
        load_holidays(std::string(SECTORLAB_DATA_DIR) + "/holidays_us_2010_2018.txt");
    const Date start = d(2012, 1, 1);
    const Date end = d(2017, 12, 31);
    const auto fridays = third_friday_schedule(cal, start, end);
    const auto month_starts = first_trading_day_schedule(cal, start, end);

    const csv::Table fixture = csv::read_file(std::string(SECTORLAB_GOLDEN_DIR) +
                                              "/calendar_schedules_2012_2017.csv");
    std::vector<Date> expected_fridays, expected_month_starts;
    for (const auto& row : fixture.rows) {
        if (row[1] == "third_friday") expected_fridays.push_back(Date::parse_iso(row[0]));
        if (row[1] == "first_trading_day") {
            expected_month_starts.push_back(Date::parse_iso(row[0]));
        }
    }
    CHECK(fridays == expected_fridays);
    CHECK(month_starts == expected_month_starts);

    // Every trigger is a trading day; regeneration is identical.
    for (const Date& x : fridays) CHECK(cal.is_trading_day(x));
    for (const Date& x : month_starts) CHECK(cal.is_trading_day(x));
    CHECK(third_friday_schedule(cal, start, end) == fridays);

    // The file-loaded calendar matches the embedded table.
    CHECK(cal.holidays == default_us_calendar().holidays);
}

TEST_CASE("holiday file parsing tolerates comments and blank lines") {
    const std::string path = "/tmp/sectorlab_test_holidays.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n\n2015-07-03  # observed\n2015-12-25\n";
    }
    const TradingCalendar cal = load_holidays(path);
    CHECK(cal.holidays.size() == 2);
    CHECK(cal.holidays.count(d(2015, 7, 3)) == 1);
    CHECK(cal.holidays.count(d(2015, 12, 25)) == 1);
}
