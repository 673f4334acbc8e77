#include "rvkit/ingest/aggregate.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace rvkit {

namespace {

double median_of(std::vector<double>& v) {
    const auto n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> median_field(std::span<const TickRecord> group, std::optional<double> TickRecord::*field) {
    std::vector<double> values;
    for (const auto& r : group) {
        if (r.*field) values.push_back(*(r.*field));
    }
    if (values.empty()) return std::nullopt;
    return median_of(values);
}

TickRecord collapse_stock(std::span<const TickRecord> group, const TickSeries& series) {
    TickRecord out = group.front();
    double pv = 0;
    double total = 0;
    double plain_sum = 0;
    double lo = group.front().price;
    double hi = lo;
    std::int64_t volume = 0;
    bool any_volume = false;
    std::int64_t trades = 0;
    for (const auto& r : group) {
        const double v = r.volume ? static_cast<double>(*r.volume) : 0.0;
        pv += r.price * v;
        total += v;
        plain_sum += r.price;
        lo = std::min(lo, r.price);
        hi = std::max(hi, r.price);
        if (r.volume) {
            volume += *r.volume;
            any_volume = true;
        }
        trades += r.trades.value_or(1);
    }
    double price = 0;
    if (total > 0) {
        price = pv / total;
    } else {
        price = plain_sum / static_cast<double>(group.size());
        spdlog::info("{} {} {}: zero total volume at one timestamp, using the unweighted mean price",
                     series.symbol, format_date(series.date), format_time_of_day(out.time));
    }
    out.price = std::clamp(price, lo, hi);
    out.volume = any_volume ? std::optional<std::int64_t>(volume) : std::nullopt;
    out.trades = trades;
    out.bid = median_field(group, &TickRecord::bid);
    out.ask = median_field(group, &TickRecord::ask);
    return out;
}

TickRecord collapse_quote(std::span<const TickRecord> group) {
    TickRecord out = group.front();
    std::vector<double> prices;
    prices.reserve(group.size());
    for (const auto& r : group) prices.push_back(r.price);
    out.price = median_of(prices);
    out.bid = median_field(group, &TickRecord::bid);
    out.ask = median_field(group, &TickRecord::ask);
    return out;
}

}  // namespace

TickSeries aggregate_same_timestamp(const TickSeries& series) {
    TickSeries out;
    out.symbol = series.symbol;
    out.date = series.date;
    out.asset_class = series.asset_class;
    out.records.reserve(series.records.size());
    const bool stock = series.asset_class == AssetClass::stock;
    const auto& recs = series.records;
    std::size_t i = 0;
    while (i < recs.size()) {
        std::size_t j = i + 1;
        while (j < recs.size() && recs[j].time == recs[i].time) ++j;
        if (j < recs.size() && recs[j].time < recs[i].time) {
            throw std::invalid_argument("aggregate_same_timestamp requires records sorted by time");
        }
        const std::span<const TickRecord> group(recs.data() + i, j - i);
        TickRecord r;
        if (group.size() == 1) {
            r = group.front();
        } else {
            r = stock ? collapse_stock(group, series) : collapse_quote(group);
        }
        if (!stock) {
            r.volume.reset();
            r.trades.reset();
        }
        out.records.push_back(r);
        i = j;
    }
    return out;
}

TickSeries flag_odd_lots(const TickSeries& series, OddLotRule rule) {
    if (series.asset_class != AssetClass::stock) {
        throw std::invalid_argument("odd-lot flags apply to stocks only");
    }
    if (rule.threshold <= 0) throw std::invalid_argument("odd-lot threshold must be positive");
    TickSeries out = series;
    std::size_t missing = 0;
    for (auto& r : out.records) {
        if (!r.volume) {
            r.odd_lot = false;
            ++missing;
        } else {
            r.odd_lot = *r.volume < rule.threshold;
        }
    }
    if (missing > 0) {
        spdlog::warn("{} {}: {} records without volume treated as round lots", series.symbol,
                     format_date(series.date), missing);
    }
    return out;
}

}  // namespace rvkit
