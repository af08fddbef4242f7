#pragma once

#include <set>
#include <string>
#include <vector>

#include "sectorlab/date.hpp"

namespace sectorlab {

// Weekday/holiday trading calendar. Trading days are exactly the weekdays
// not present in the holiday set.
struct TradingCalendar {
    std::set<Date> holidays;

    bool is_trading_day(const Date& d) const {
        return !d.is_weekend() && !holidays.count(d);
    }
};

// Bundled US market holiday table covering 2010-2018 (observed dates).
TradingCalendar default_us_calendar();

// Holiday file: one ISO-8601 date per line, '#' starts a comment.
TradingCalendar load_holidays(const std::string& path);

std::vector<Date> trading_days(const TradingCalendar& cal, const Date& start,
                               const Date& end);

// Third Friday of each month in [start, end], rolled forward to the next
// trading day on a holiday collision. A trigger that would roll past its
// month end (no trading days left) is skipped and reported in `warnings`.
std::vector<Date> third_friday_schedule(const TradingCalendar& cal, const Date& start,
                                        const Date& end,
                                        std::vector<std::string>* warnings = nullptr);

// Earliest trading day of each month in [start, end]. Months whose first
// trading day falls before `start` contribute no trigger.
std::vector<Date> first_trading_day_schedule(const TradingCalendar& cal,
                                             const Date& start, const Date& end,
                                             std::vector<std::string>* warnings = nullptr);

} // namespace sectorlab
