#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace rvkit {

using Date = std::chrono::year_month_day;
/// Time of day, measured from local midnight.
using Millis = std::chrono::milliseconds;

constexpr Millis hms(int h, int m, int s = 0, int ms = 0) {
    return Millis{((static_cast<std::int64_t>(h) * 60 + m) * 60 + s) * 1000 + ms};
}

constexpr Millis kDayLength = hms(24, 0);

/// Accepts YYYY-MM-DD, YYYY_MM_DD and MM/DD/YYYY.
Date parse_date(std::string_view text);

/// HH:MM[:SS[.mmm]]
Millis parse_time_of_day(std::string_view text);

std::string format_date(Date d);             // YYYY-MM-DD
std::string format_date_file(Date d);        // YYYY_MM_DD
std::string format_time_of_day(Millis t);    // HH:MM:SS.mmm

inline bool is_weekend(Date d) {
    const std::chrono::weekday wd{std::chrono::sys_days{d}};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

inline Date add_days(Date d, int n) {
    return Date{std::chrono::sys_days{d} + std::chrono::days{n}};
}

inline int days_between(Date from, Date to) {
    return static_cast<int>((std::chrono::sys_days{to} - std::chrono::sys_days{from}).count());
}

Date add_months(Date d, int months);

/// Current UTC calendar date.
Date today_utc();

}  // namespace rvkit
