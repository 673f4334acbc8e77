#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvkit/common/dates.hpp"

namespace rvkit {

enum class AssetClass { stock, exchange_rate, future };

/// Short identifier used in URLs and CLI flags: stocks, exchange_rates, futures.
std::string_view asset_class_id(AssetClass c);
/// Directory name of the raw-data layout: "stocks", "exchange rates", "futures".
std::string_view asset_class_dir(AssetClass c);
/// Accepts the id, the directory name and a few singular aliases.
std::optional<AssetClass> parse_asset_class(std::string_view text);

/// Per-record status. Stored as 1 / NaN / 0 in the Flag column.
enum class TickFlag : std::uint8_t { valid, outlier, off_hours };

struct TickRecord {
    Millis time{0};
    double price = 0.0;
    std::optional<double> bid;
    std::optional<double> ask;
    std::optional<std::int64_t> volume;
    std::optional<std::int64_t> trades;
    TickFlag flag = TickFlag::valid;
    bool odd_lot = false;
    /// Cleaned price for outliers; the original stays in `price`.
    std::optional<double> replacement;

    [[nodiscard]] bool in_session() const noexcept { return flag != TickFlag::off_hours; }
    [[nodiscard]] bool crossed() const noexcept { return bid && ask && *bid > *ask; }

    friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct TickSeries {
    std::string symbol;
    Date date{};
    AssetClass asset_class = AssetClass::stock;
    std::vector<TickRecord> records;

    [[nodiscard]] bool empty() const noexcept { return records.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
};

bool same_content(const TickSeries& a, const TickSeries& b);

struct TradingSession {
    Date date{};
    Millis open{0};
    Millis close{0};
    AssetClass asset_class = AssetClass::stock;
    bool early_close = false;

    [[nodiscard]] bool contains(Millis t) const noexcept { return t >= open && t <= close; }
    [[nodiscard]] Millis length() const noexcept { return close - open; }
};

struct OddLotRule {
    std::int64_t threshold = 100;
};

}  // namespace rvkit
