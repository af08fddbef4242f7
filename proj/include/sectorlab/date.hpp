#pragma once

#include <chrono>
#include <compare>
#include <string>

#include "sectorlab/error.hpp"

namespace sectorlab {

// Calendar date, stored as a day count so arithmetic and comparison are
// trivially cheap. ISO-8601 (YYYY-MM-DD) is the only text form accepted.
class Date {
public:
    Date() : days_(std::chrono::sys_days{}) {}

    static Date from_ymd(int year, unsigned month, unsigned day) {
        const std::chrono::year_month_day ymd{
            std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
        if (!ymd.ok()) {
            throw Error("invalid calendar date: " + std::to_string(year) + "-" +
                        std::to_string(month) + "-" + std::to_string(day));
        }
        return Date(std::chrono::sys_days{ymd});
    }

    static Date parse_iso(const std::string& text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw Error("unparseable date (expected YYYY-MM-DD): '" + text + "'");
        }
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
            if (text[i] < '0' || text[i] > '9') {
                throw Error("unparseable date (expected YYYY-MM-DD): '" + text + "'");
            }
        }
        const int y = std::stoi(text.substr(0, 4));
        const unsigned m = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
        const unsigned d = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
        return from_ymd(y, m, d);
    }

    std::string iso() const {
        const auto ymd = ymd_();
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                      unsigned(ymd.month()), unsigned(ymd.day()));
        return std::string(buf);
    }

    int year() const { return int(ymd_().year()); }
    unsigned month() const { return unsigned(ymd_().month()); }
    unsigned day() const { return unsigned(ymd_().day()); }

    // ISO encoding: Monday=1 .. Sunday=7.
    unsigned weekday_iso() const {
        return std::chrono::weekday{days_}.iso_encoding();
    }

    bool is_weekend() const {
        const unsigned wd = weekday_iso();
        return wd == 6 || wd == 7;
    }

    Date plus_days(int n) const { return Date(days_ + std::chrono::days{n}); }

    // Days from *this to other (positive when other is later).
    int days_until(const Date& other) const {
        return static_cast<int>((other.days_ - days_).count());
    }

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    explicit Date(std::chrono::sys_days d) : days_(d) {}

    std::chrono::year_month_day ymd_() const {
        return std::chrono::year_month_day{days_};
    }

    std::chrono::sys_days days_;
};

} // namespace sectorlab
