#include "rvkit/sampling/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvkit {

std::vector<TimedPrice> session_prices(const TickSeries& series, PriceView view, bool round_lots_only) {
    std::vector<TimedPrice> out;
    out.reserve(series.records.size());
    const bool quotes = series.asset_class != AssetClass::stock;
    for (const auto& rec : series.records) {
        if (!rec.in_session()) continue;
        if (round_lots_only && rec.odd_lot) continue;
        double p = rec.price;
        if (quotes) {
            if (rec.bid && rec.ask) p = 0.5 * (*rec.bid + *rec.ask);
        } else if (rec.flag == TickFlag::outlier && view == PriceView::cleaned) {
            if (!rec.replacement) continue;
            p = *rec.replacement;
        }
        if (!(p > 0.0) || !std::isfinite(p)) continue;
        out.push_back({rec.time, p, rec.odd_lot});
    }
    return out;
}

std::optional<RegularGrid> previous_tick_grid(std::span<const TimedPrice> prices, Millis interval,
                                              const TradingSession& session, Millis offset) {
    if (interval <= Millis{0}) throw std::invalid_argument("grid interval must be positive");
    if (prices.empty()) return std::nullopt;
    const Millis start = session.open + offset;
    if (start > session.close) return std::nullopt;
    const auto points = static_cast<std::size_t>((session.close - start) / interval) + 1;

    RegularGrid g;
    g.date = session.date;
    g.interval = interval;
    g.times.resize(points);
    g.prices.resize(points);
    g.tick_counts.assign(points, 0);
    std::size_t k = 0;
    double last = prices.front().price;
    for (std::size_t i = 0; i < points; ++i) {
        const Millis t = start + interval * static_cast<Millis::rep>(i);
        while (k < prices.size() && prices[k].time <= t) {
            last = prices[k].price;
            ++g.tick_counts[i];
            ++k;
        }
        g.times[i] = t;
        g.prices[i] = last;
    }
    return g;
}

std::optional<RegularGrid> previous_tick_grid(const TickSeries& series, Millis interval, const TradingSession& session,
                                              PriceView view, Millis offset) {
    const auto prices = session_prices(series, view);
    auto g = previous_tick_grid(prices, interval, session, offset);
    if (g) g->symbol = series.symbol;
    return g;
}

std::vector<RegularGrid> subsample_grids(std::span<const TimedPrice> prices, const TradingSession& session,
                                         Millis base, Millis shift, int count) {
    if (count < 1) throw std::invalid_argument("subsample count must be >= 1");
    std::vector<RegularGrid> out;
    for (int j = 0; j < count; ++j) {
        auto g = previous_tick_grid(prices, base, session, shift * j);
        if (!g) break;
        out.push_back(std::move(*g));
    }
    return out;
}

std::vector<RegularGrid> subsample_grids(const TickSeries& series, const TradingSession& session, PriceView view,
                                         Millis base, Millis shift, int count) {
    const auto prices = session_prices(series, view);
    auto grids = subsample_grids(prices, session, base, shift, count);
    for (auto& g : grids) g.symbol = series.symbol;
    return grids;
}

std::vector<double> log_returns(std::span<const double> prices) {
    std::vector<double> r;
    if (prices.size() < 2) return r;
    r.reserve(prices.size() - 1);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
            throw std::invalid_argument("log_returns: non-positive price at index " + std::to_string(i));
        if (i > 0) r.push_back(std::log(prices[i] / prices[i - 1]));
    }
    return r;
}

bool is_eligible(const RegularGrid& one_minute_grid, std::span<const TimedPrice> prices, const EligibilityRule& rule) {
    if (prices.empty()) return false;
    const auto observed = static_cast<std::size_t>(std::count_if(
        one_minute_grid.tick_counts.begin(), one_minute_grid.tick_counts.end(), [](auto c) { return c > 0; }));
    return observed >= rule.min_observations && prices.back().time - prices.front().time >= rule.min_span;
}

std::vector<PriceRange> interval_ranges(std::span<const TimedPrice> prices, const TradingSession& session,
                                        Millis interval) {
    if (interval <= Millis{0}) throw std::invalid_argument("interval must be positive");
    const auto span = session.close - session.open;
    const auto n = static_cast<std::size_t>(std::max<Millis::rep>(1, (span + interval - Millis{1}) / interval));
    std::vector<PriceRange> acc(n);
    std::vector<bool> seen(n, false);
    for (const auto& p : prices) {
        std::size_t idx = 0;
        if (p.time > session.open) idx = static_cast<std::size_t>((p.time - session.open - Millis{1}) / interval);
        idx = std::min(idx, n - 1);
        if (!seen[idx]) {
            acc[idx] = {p.price, p.price};
            seen[idx] = true;
        } else {
            acc[idx].high = std::max(acc[idx].high, p.price);
            acc[idx].low = std::min(acc[idx].low, p.price);
        }
    }
    std::vector<PriceRange> out;
    for (std::size_t i = 0; i < n; ++i)
        if (seen[i]) out.push_back(acc[i]);
    return out;
}

std::optional<SynchronizedPanel> synchronize(std::span<const TickSeries> days, std::span<const TradingSession> sessions,
                                             Millis interval, PriceView view) {
    if (days.empty() || days.size() != sessions.size())
        throw std::invalid_argument("synchronize: one session per series");
    const Date date = days.front().date;
    TradingSession common = sessions.front();
    for (std::size_t a = 0; a < days.size(); ++a) {
        if (days[a].date != date) throw std::invalid_argument("synchronize: series must share the date");
        common.open = std::min(common.open, sessions[a].open);
        common.close = std::max(common.close, sessions[a].close);
    }
    std::vector<std::vector<TimedPrice>> prices;
    Millis earliest_last{0};
    Millis latest_first{0};
    for (std::size_t a = 0; a < days.size(); ++a) {
        auto p = session_prices(days[a], view);
        if (p.empty()) return std::nullopt;
        latest_first = a == 0 ? p.front().time : std::max(latest_first, p.front().time);
        earliest_last = a == 0 ? p.back().time : std::min(earliest_last, p.back().time);
        prices.push_back(std::move(p));
    }
    if (latest_first > earliest_last) return std::nullopt;

    SynchronizedPanel panel;
    panel.date = date;
    for (std::size_t a = 0; a < days.size(); ++a) {
        auto g = previous_tick_grid(prices[a], interval, common);
        if (!g || g->size() < 2) return std::nullopt;
        const auto r = log_returns(g->prices);
        if (a == 0) {
            panel.times = g->times;
            panel.returns.resize(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(days.size()));
        }
        panel.returns.col(static_cast<Eigen::Index>(a)) =
            Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
        panel.symbols.push_back(days[a].symbol);
    }
    return panel;
}

std::optional<SynchronizedPanel> synchronize(std::span<const TickSeries> days, const HolidayCalendar& calendar,
                                             Millis interval, PriceView view) {
    std::vector<TradingSession> sessions;
    for (const auto& d : days) {
        auto s = session_for(d.asset_class, d.date, calendar);
        if (!s) return std::nullopt;
        sessions.push_back(*s);
    }
    return synchronize(days, sessions, interval, view);
}

}  // namespace rvkit
