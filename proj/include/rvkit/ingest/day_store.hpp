#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rvkit/ingest/types.hpp"
#include "rvkit/io/parquet.hpp"

namespace rvkit {

// Raw-data layout: <root>/<stocks|exchange rates|futures>/<SYMBOL>/<YYYY_MM_DD>.parquet
// Columns: Time (time32 ms), Price, Bid, Ask, Volume, Trades, Flag (1 valid, NaN outlier,
// 0 off hours), OddLot, Clean (replacement price of outliers). Absent Bid/Ask/Clean are
// NaN; absent Volume/Trades are -1.

std::filesystem::path symbol_dir(const std::filesystem::path& root, AssetClass c, const std::string& symbol);
std::filesystem::path day_path(const std::filesystem::path& root, AssetClass c, const std::string& symbol, Date date);

io::Table to_table(const TickSeries& series);
/// Throws IntegrityError when the table does not follow the day-file schema.
TickSeries from_table(const io::Table& table);

/// Atomic per-file write; concurrent writers of different symbol-days never interfere.
std::filesystem::path store_day(const TickSeries& series, const std::filesystem::path& root);

/// nullopt when the day file does not exist (holiday, not downloaded). Corrupt file: IntegrityError.
std::optional<TickSeries> load_day(const std::filesystem::path& root, AssetClass c, const std::string& symbol,
                                   Date date);

/// Dates with a stored file, ascending.
std::vector<Date> list_days(const std::filesystem::path& root, AssetClass c, const std::string& symbol);
/// Symbols with a folder under the asset-class directory, sorted.
std::vector<std::string> list_symbols(const std::filesystem::path& root, AssetClass c);

/// Copies `adjustments.txt` byte-for-byte into the symbol folder. Never read by computations.
void preserve_adjustments(const std::filesystem::path& source, const std::filesystem::path& root, AssetClass c,
                          const std::string& symbol);

}  // namespace rvkit
