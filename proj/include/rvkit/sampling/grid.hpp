#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rvkit/ingest/calendar.hpp"
#include "rvkit/ingest/types.hpp"

namespace rvkit {

enum class PriceView { cleaned, raw };

struct TimedPrice {
    Millis time{0};
    double price = 0.0;
    bool odd_lot = false;
};

/// In-session prices of one day in time order. Stocks use trade prices (cleaned view:
/// outliers replaced, unreplaced outliers dropped); exchange rates and futures use the
/// bid/ask mid-quote. `round_lots_only` drops odd-lot trades.
std::vector<TimedPrice> session_prices(const TickSeries& series, PriceView view, bool round_lots_only = false);

/// Equally spaced previous-tick prices. Point i sits at open + offset + i * interval and
/// takes the last price with timestamp <= that instant; points before the day's first
/// price take the first price.
struct RegularGrid {
    std::string symbol;
    Date date{};
    Millis interval{0};
    std::vector<Millis> times;
    std::vector<double> prices;
    /// Ticks that fell in (times[i-1], times[i]]; element 0 counts ticks at or before times[0].
    std::vector<std::uint32_t> tick_counts;

    [[nodiscard]] std::size_t size() const noexcept { return prices.size(); }
};

/// nullopt when the day has no usable price (empty-grid signal).
std::optional<RegularGrid> previous_tick_grid(const TickSeries& series, Millis interval, const TradingSession& session,
                                              PriceView view = PriceView::cleaned, Millis offset = Millis{0});

std::optional<RegularGrid> previous_tick_grid(std::span<const TimedPrice> prices, Millis interval,
                                              const TradingSession& session, Millis offset = Millis{0});

/// Grid j starts at open + j * shift and steps by `base`; grid 0 is the plain base grid.
std::vector<RegularGrid> subsample_grids(const TickSeries& series, const TradingSession& session,
                                         PriceView view = PriceView::cleaned, Millis base = hms(0, 5),
                                         Millis shift = hms(0, 1), int count = 5);

std::vector<RegularGrid> subsample_grids(std::span<const TimedPrice> prices, const TradingSession& session,
                                         Millis base = hms(0, 5), Millis shift = hms(0, 1), int count = 5);

/// r_i = ln(p_i / p_{i-1}); throws std::invalid_argument on a non-positive price.
std::vector<double> log_returns(std::span<const double> prices);
inline std::vector<double> log_returns(const RegularGrid& grid) { return log_returns(grid.prices); }

/// Day eligibility: at least 40 one-minute grid points observed a tick, and tick activity
/// spans at least two hours.
struct EligibilityRule {
    std::size_t min_observations = 40;
    Millis min_span = hms(2, 0);
};
bool is_eligible(const RegularGrid& one_minute_grid, std::span<const TimedPrice> prices,
                 const EligibilityRule& rule = {});

struct PriceRange {
    double high = 0.0;
    double low = 0.0;
};

/// High and low of the ticks inside each grid interval (open + i*interval, open + (i+1)*interval];
/// ticks exactly at the open belong to the first interval. Intervals without ticks are skipped.
std::vector<PriceRange> interval_ranges(std::span<const TimedPrice> prices, const TradingSession& session,
                                        Millis interval);

/// Returns of several assets on one shared grid.
struct SynchronizedPanel {
    Date date{};
    std::vector<std::string> symbols;
    std::vector<Millis> times;   ///< grid instants, size m + 1
    Eigen::MatrixXd returns;     ///< m x N

    [[nodiscard]] Eigen::Index intervals() const { return returns.rows(); }
    [[nodiscard]] Eigen::Index assets() const { return returns.cols(); }
};

/// Previous-tick synchronization on a common grid spanning the union of the sessions.
/// An asset that is not trading in part of the window contributes zero returns there.
/// nullopt when a series has no prices or the assets' activity windows never overlap.
std::optional<SynchronizedPanel> synchronize(std::span<const TickSeries> days, std::span<const TradingSession> sessions,
                                             Millis interval = hms(0, 1), PriceView view = PriceView::cleaned);

std::optional<SynchronizedPanel> synchronize(std::span<const TickSeries> days, const HolidayCalendar& calendar,
                                             Millis interval = hms(0, 1), PriceView view = PriceView::cleaned);

}  // namespace rvkit
