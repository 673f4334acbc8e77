#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "rvkit/ingest/calendar.hpp"
#include "rvkit/ingest/types.hpp"

namespace rvkit {

// Raw tick text files are comma-separated. With a header line, columns are matched by
// name (case-insensitive): Date, Time, Price, Bid, Ask, Volume (alias Size), Trades.
// Without a header the positional layout is Date,Time,Price,Bid,Ask,Volume.
// Date accepts MM/DD/YYYY or YYYY-MM-DD; Time is HH:MM:SS[.fff] in exchange local time.
// Stocks need Price (Volume strongly recommended); exchange rates and futures also need
// Bid and Ask. Exchange-rate and futures timestamps are truncated to whole seconds.

/// All days found in the stream, each in timestamp order with raw duplicates kept
/// and flags set from the day's session (valid inside, off_hours outside).
std::vector<TickSeries> parse_tick_stream(std::istream& in, AssetClass asset_class, const std::string& symbol,
                                          const HolidayCalendar& calendar);

std::vector<TickSeries> parse_tick_file_days(const std::filesystem::path& path, AssetClass asset_class,
                                             const HolidayCalendar& calendar, std::string symbol = {});

/// Single-day file. An empty file yields an empty series; several dates is a ParseError.
/// The symbol defaults to the file stem up to the first '_' or '.'.
TickSeries parse_tick_file(const std::filesystem::path& path, AssetClass asset_class,
                           const HolidayCalendar& calendar, std::string symbol = {});

/// Re-applies valid/off_hours flags from a session; outlier flags inside the session are kept.
void apply_session_flags(TickSeries& series, const std::optional<TradingSession>& session);

}  // namespace rvkit
