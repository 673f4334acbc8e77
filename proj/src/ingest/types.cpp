#include "rvkit/ingest/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace rvkit {

std::string_view asset_class_id(AssetClass c) {
    switch (c) {
        case AssetClass::stock: return "stocks";
        case AssetClass::exchange_rate: return "exchange_rates";
        case AssetClass::future: return "futures";
    }
    return "stocks";
}

std::string_view asset_class_dir(AssetClass c) {
    switch (c) {
        case AssetClass::stock: return "stocks";
        case AssetClass::exchange_rate: return "exchange rates";
        case AssetClass::future: return "futures";
    }
    return "stocks";
}

std::optional<AssetClass> parse_asset_class(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) {
        return ch == ' ' || ch == '-' ? '_' : static_cast<char>(std::tolower(ch));
    });
    if (s == "stocks" || s == "stock") return AssetClass::stock;
    if (s == "exchange_rates" || s == "exchange_rate" || s == "fx" || s == "forex") {
        return AssetClass::exchange_rate;
    }
    if (s == "futures" || s == "future") return AssetClass::future;
    return std::nullopt;
}

namespace {

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_double(*a, *b);
}

}  // namespace

bool same_content(const TickSeries& a, const TickSeries& b) {
    if (a.symbol != b.symbol || a.date != b.date || a.asset_class != b.asset_class ||
        a.records.size() != b.records.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& x = a.records[i];
        const auto& y = b.records[i];
        if (x.time != y.time || !same_double(x.price, y.price) || !same_opt(x.bid, y.bid) ||
            !same_opt(x.ask, y.ask) || x.volume != y.volume || x.trades != y.trades ||
            x.flag != y.flag || x.odd_lot != y.odd_lot || !same_opt(x.replacement, y.replacement)) {
            return false;
        }
    }
    return true;
}

}  // namespace rvkit
