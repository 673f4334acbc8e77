#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>

#include "rvkit/ingest/types.hpp"

namespace rvkit {

/// Versioned table of market closures and shortened sessions, one list per asset class.
///
/// Closure rules are irregular (observed holidays move with weekends), so the table is
/// data rather than rules; see config/default.ini for the bundled version.
class HolidayCalendar {
public:
    HolidayCalendar() = default;
    HolidayCalendar(std::string version, Date first_supported)
        : version_(std::move(version)), first_supported_(first_supported) {}

    void add_holiday(AssetClass c, Date d) { lists_[index(c)].holidays.insert(d); }
    void add_early_close(AssetClass c, Date d) { lists_[index(c)].early_closes.insert(d); }

    [[nodiscard]] bool is_holiday(AssetClass c, Date d) const {
        return lists_[index(c)].holidays.count(d) != 0;
    }
    [[nodiscard]] bool is_early_close(AssetClass c, Date d) const {
        return lists_[index(c)].early_closes.count(d) != 0;
    }
    [[nodiscard]] const std::set<Date>& holidays(AssetClass c) const { return lists_[index(c)].holidays; }
    [[nodiscard]] const std::set<Date>& early_closes(AssetClass c) const {
        return lists_[index(c)].early_closes;
    }

    [[nodiscard]] const std::string& version() const noexcept { return version_; }
    [[nodiscard]] Date first_supported() const noexcept { return first_supported_; }
    void set_first_supported(Date d) { first_supported_ = d; }
    void set_version(std::string v) { version_ = std::move(v); }

private:
    struct Lists {
        std::set<Date> holidays;
        std::set<Date> early_closes;
    };
    static std::size_t index(AssetClass c) { return static_cast<std::size_t>(c); }

    std::string version_ = "unversioned";
    Date first_supported_{std::chrono::year{2009}, std::chrono::January, std::chrono::day{1}};
    std::array<Lists, 3> lists_{};
};

/// Regular stock hours extend five minutes past the official 16:00 close.
inline constexpr Millis kStockOpen = hms(9, 30);
inline constexpr Millis kStockClose = hms(16, 5);
inline constexpr Millis kEarlyClose = hms(13, 0);
/// Exchange rates and futures stop at 17:00 on Fridays; other weekdays run midnight to midnight.
inline constexpr Millis kWeeklyClose = hms(17, 0);

/// Trading session of one calendar date, or nullopt for weekends and listed holidays.
/// Throws std::out_of_range for dates before the calendar's supported range.
std::optional<TradingSession> session_for(AssetClass asset_class, Date date, const HolidayCalendar& calendar);

}  // namespace rvkit
