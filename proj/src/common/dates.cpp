#include "rvkit/common/dates.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "rvkit/common/errors.hpp"

namespace rvkit {

namespace {

int to_int(std::string_view s, std::string_view whole) {
    int value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw ParseError("invalid date/time component in '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    int y = 0;
    int m = 0;
    int d = 0;
    if (text.size() == 10 && (text[4] == '-' || text[4] == '_') && text[7] == text[4]) {
        y = to_int(text.substr(0, 4), text);
        m = to_int(text.substr(5, 2), text);
        d = to_int(text.substr(8, 2), text);
    } else if (text.size() == 10 && text[2] == '/' && text[5] == '/') {
        m = to_int(text.substr(0, 2), text);
        d = to_int(text.substr(3, 2), text);
        y = to_int(text.substr(6, 4), text);
    } else {
        throw ParseError("unrecognised date '" + std::string(text) + "'");
    }
    const Date out{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                   std::chrono::day{static_cast<unsigned>(d)}};
    if (!out.ok()) {
        throw ParseError("invalid calendar date '" + std::string(text) + "'");
    }
    return out;
}

Millis parse_time_of_day(std::string_view text) {
    // HH:MM[:SS[.fff]]
    if (text.size() < 5 || text[2] != ':') {
        throw ParseError("unrecognised time '" + std::string(text) + "'");
    }
    const int h = to_int(text.substr(0, 2), text);
    const int mi = to_int(text.substr(3, 2), text);
    int s = 0;
    int ms = 0;
    if (text.size() > 5) {
        if (text[5] != ':' || text.size() < 8) {
            throw ParseError("unrecognised time '" + std::string(text) + "'");
        }
        s = to_int(text.substr(6, 2), text);
        if (text.size() > 8) {
            if (text[8] != '.' || text.size() == 9) {
                throw ParseError("unrecognised time '" + std::string(text) + "'");
            }
            auto frac = text.substr(9);
            // Only millisecond precision is kept.
            std::string digits(frac.substr(0, 3));
            while (digits.size() < 3) digits.push_back('0');
            ms = to_int(digits, text);
            for (char c : frac) {
                if (c < '0' || c > '9') throw ParseError("unrecognised time '" + std::string(text) + "'");
            }
        }
    }
    if (h > 23 || mi > 59 || s > 59) {
        throw ParseError("time of day out of range '" + std::string(text) + "'");
    }
    return hms(h, mi, s, ms);
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_date_file(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d_%02u_%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_time_of_day(Millis t) {
    const auto total = t.count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld.%03lld",
                  static_cast<long long>(total / 3'600'000), static_cast<long long>(total / 60'000 % 60),
                  static_cast<long long>(total / 1000 % 60), static_cast<long long>(total % 1000));
    return buf;
}

Date add_months(Date d, int months) {
    using namespace std::chrono;
    year_month_day shifted = d + std::chrono::months{months};
    if (!shifted.ok()) {
        // Clamp day-of-month overflow (e.g. Mar 31 - 1 month).
        shifted = year_month_day_last{shifted.year(), month_day_last{shifted.month()}};
    }
    return shifted;
}

Date today_utc() {
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

}  // namespace rvkit
