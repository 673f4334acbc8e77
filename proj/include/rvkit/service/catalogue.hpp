#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "rvkit/common/dates.hpp"
#include "rvkit/ingest/types.hpp"

namespace rvkit {

struct AssetInfo {
    AssetClass asset_class = AssetClass::stock;
    std::string symbol;
    std::string name;
    std::string sector;    // empty for exchange rates
    std::string exchange;  // futures only
    Date first_date{};
    bool dow30 = false;
};

/// Reference metadata of the covered universe: 40 stocks, 5 exchange rates, 5 futures.
std::span<const AssetInfo> reference_assets();

std::optional<AssetInfo> find_reference_asset(std::string_view symbol);

}  // namespace rvkit
