#include "rvkit/ingest/calendar.hpp"

#include <stdexcept>

namespace rvkit {

std::optional<TradingSession> session_for(AssetClass asset_class, Date date, const HolidayCalendar& calendar) {
    if (!date.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    if (std::chrono::sys_days{date} < std::chrono::sys_days{calendar.first_supported()}) {
        throw std::out_of_range("date " + format_date(date) + " precedes the supported range starting " +
                                format_date(calendar.first_supported()));
    }
    if (is_weekend(date) || calendar.is_holiday(asset_class, date)) {
        return std::nullopt;
    }
    TradingSession s;
    s.date = date;
    s.asset_class = asset_class;
    s.early_close = calendar.is_early_close(asset_class, date);
    if (asset_class == AssetClass::stock) {
        s.open = kStockOpen;
        s.close = s.early_close ? kEarlyClose : kStockClose;
        return s;
    }
    const bool friday = std::chrono::weekday{std::chrono::sys_days{date}} == std::chrono::Friday;
    s.open = Millis{0};
    s.close = s.early_close ? kEarlyClose : (friday ? kWeeklyClose : kDayLength);
    return s;
}

}  // namespace rvkit
