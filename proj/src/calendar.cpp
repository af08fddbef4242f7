#include "sectorlab/calendar.hpp"

#include <fstream>

#include "sectorlab/csv.hpp"

namespace sectorlab {

namespace {

// US market full-closure holidays, 2010-2018, as observed (New Year's Day,
// MLK Day, Washington's Birthday, Good Friday, Memorial Day, Independence
// Day, Labor Day, Thanksgiving, Christmas). Weekend holidays appear on their
// observed weekday; New Year's Day falling on a Saturday is not observed.
constexpr const char* kUsHolidays[] = {
    "2010-01-01", "2010-01-18", "2010-02-15", "2010-04-02", "2010-05-31",
    "2010-07-05", "2010-09-06", "2010-11-25", "2010-12-24",
    "2011-01-17", "2011-02-21", "2011-04-22", "2011-05-30", "2011-07-04",
    "2011-09-05", "2011-11-24", "2011-12-26",
    "2012-01-02", "2012-01-16", "2012-02-20", "2012-04-06", "2012-05-28",
    "2012-07-04", "2012-09-03", "2012-11-22", "2012-12-25",
    "2013-01-01", "2013-01-21", "2013-02-18", "2013-03-29", "2013-05-27",
    "2013-07-04", "2013-09-02", "2013-11-28", "2013-12-25",
    "2014-01-01", "2014-01-20", "2014-02-17", "2014-04-18", "2014-05-26",
    "2014-07-04", "2014-09-01", "2014-11-27", "2014-12-25",
    "2015-01-01", "2015-01-19", "2015-02-16", "2015-04-03", "2015-05-25",
    "2015-07-03", "2015-09-07", "2015-11-26", "2015-12-25",
    "2016-01-01", "2016-01-18", "2016-02-15", "2016-03-25", "2016-05-30",
    "2016-07-04", "2016-09-05", "2016-11-24", "2016-12-26",
    "2017-01-02", "2017-01-16", "2017-02-20", "2017-04-14", "2017-05-29",
    "2017-07-04", "2017-09-04", "2017-11-23", "2017-12-25",
    "2018-01-01", "2018-01-15", "2018-02-19", "2018-03-30", "2018-05-28",
    "2018-07-04", "2018-09-03", "2018-11-22", "2018-12-25",
};

Date month_start(int year, unsigned month) { return Date::from_ymd(year, month, 1); }

Date next_month_start(int year, unsigned month) {
    if (month == 12) return Date::from_ymd(year + 1, 1, 1);
    return Date::from_ymd(year, month + 1, 1);
}

} // namespace

TradingCalendar default_us_calendar() {
    TradingCalendar cal;
    for (const char* iso : kUsHolidays) cal.holidays.insert(Date::parse_iso(iso));
    return cal;
}

TradingCalendar load_holidays(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open holiday file: " + path);
    TradingCalendar cal;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = csv::trim(line);
        if (line.empty()) continue;
        cal.holidays.insert(Date::parse_iso(line));
    }
    return cal;
}

std::vector<Date> trading_days(const TradingCalendar& cal, const Date& start,
                               const Date& end) {
    if (end < start) {
        throw Error("trading_days: start " + start.iso() + " is after end " + end.iso());
    }
    std::vector<Date> out;
    for (Date d = start; d <= end; d = d.plus_days(1)) {
        if (cal.is_trading_day(d)) out.push_back(d);
    }
    return out;
}

std::vector<Date> third_friday_schedule(const TradingCalendar& cal, const Date& start,
                                        const Date& end,
                                        std::vector<std::string>* warnings) {
    std::vector<Date> out;
    int year = start.year();
    unsigned month = start.month();
    while (month_start(year, month) <= end) {
        // Third Friday: first Friday of the month plus two weeks.
        const Date first = month_start(year, month);
        const unsigned wd = first.weekday_iso(); // Mon=1..Sun=7
        const int days_to_friday = (5 - static_cast<int>(wd) + 7) % 7;
        Date trigger = first.plus_days(days_to_friday + 14);

        // Roll forward past holidays/weekends, staying within the month.
        const Date month_end = next_month_start(year, month).plus_days(-1);
        bool skipped = false;
        while (!cal.is_trading_day(trigger)) {
            trigger = trigger.plus_days(1);
            if (trigger > month_end) {
                if (warnings) {
                    warnings->push_back("restructure trigger for " + std::to_string(year) +
                                        "-" + std::to_string(month) +
                                        " skipped: no trading day left in month");
                }
                skipped = true;
                break;
            }
        }
        if (!skipped && trigger >= start && trigger <= end) out.push_back(trigger);

        if (month == 12) {
            month = 1;
            ++year;
        } else {
            ++month;
        }
    }
    return out;
}

std::vector<Date> first_trading_day_schedule(const TradingCalendar& cal,
                                             const Date& start, const Date& end,
                                             std::vector<std::string>* warnings) {
    std::vector<Date> out;
    int year = start.year();
    unsigned month = start.month();
    while (month_start(year, month) <= end) {
        const Date month_end = next_month_start(year, month).plus_days(-1);
        Date trigger = month_start(year, month);
        bool skipped = false;
        while (!cal.is_trading_day(trigger)) {
            trigger = trigger.plus_days(1);
            if (trigger > month_end) {
                if (warnings) {
                    warnings->push_back("rebalance trigger for " + std::to_string(year) +
                                        "-" + std::to_string(month) +
                                        " skipped: month has no trading days");
                }
                skipped = true;
                break;
            }
        }
        if (!skipped && trigger >= start && trigger <= end) out.push_back(trigger);

        if (month == 12) {
            month = 1;
            ++year;
        } else {
            ++month;
        }
    }
    return out;
}

} // namespace sectorlab
