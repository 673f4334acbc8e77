#pragma once

#include <map>
#include <string>

#include "rvkit/ingest/types.hpp"

namespace rvkit {

/// Collapses records sharing a timestamp. Stocks: VWAP price, summed volume and trade
/// count (an absent trade count counts as one trade). Exchange rates and futures: per-field
/// median of price, bid and ask; volume and trades are dropped.
/// A stock timestamp whose total volume is zero falls back to the unweighted mean price.
/// Requires `series` sorted by time.
TickSeries aggregate_same_timestamp(const TickSeries& series);

/// Per-symbol odd-lot thresholds; symbols without an override use the default rule.
struct OddLotOverrides {
    OddLotRule default_rule{};
    std::map<std::string, OddLotRule> by_symbol;

    [[nodiscard]] OddLotRule rule_for(const std::string& symbol) const {
        auto it = by_symbol.find(symbol);
        return it == by_symbol.end() ? default_rule : it->second;
    }
};

/// Marks odd_lot = volume < threshold. Records without volume stay non-odd-lot.
/// Throws std::invalid_argument for non-stock series or a non-positive threshold.
TickSeries flag_odd_lots(const TickSeries& series, OddLotRule rule);

}  // namespace rvkit
