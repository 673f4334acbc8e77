#include <gtest/gtest.h>

#include <cmath>

#include "rvkit/sampling/grid.hpp"
#include "test_support.hpp"

namespace rvkit {
namespace {

using namespace testing;

TickSeries ticks(std::initializer_list<std::pair<Millis, double>> rows, AssetClass c = AssetClass::stock) {
    TickSeries s{"X", ymd(2024, 3, 11), c, {}};
    for (auto [t, p] : rows) {
        TickRecord r;
        r.time = t;
        r.price = p;
        r.volume = 100;
        s.records.push_back(r);
    }
    return s;
}

// Previous-tick value at t computed by scanning every tick.
double scan_price(const std::vector<TimedPrice>& p, Millis t) {
    double v = p.front().price;
    for (const auto& x : p)
        if (x.time <= t) v = x.price;
    return v;
}

TEST(Grid, HandSimulation) {
    const auto s = ticks({{hms(9, 30, 15), 100.0}, {hms(9, 31, 30), 101.0}});
    const auto g = previous_tick_grid(s, hms(0, 1), stock_session());
    ASSERT_TRUE(g);
    EXPECT_EQ(g->times[0], hms(9, 30));
    EXPECT_EQ(g->times[1], hms(9, 31));
    EXPECT_DOUBLE_EQ(g->prices[0], 100.0);
    EXPECT_DOUBLE_EQ(g->prices[1], 100.0);
    EXPECT_DOUBLE_EQ(g->prices[2], 101.0);
    EXPECT_DOUBLE_EQ(g->prices[3], 101.0);
    EXPECT_EQ(g->size(), 396u);
    EXPECT_EQ(g->times.back(), hms(16, 5));
}

TEST(Grid, UpperBoundaryIncluded) {
    const auto s = ticks({{hms(9, 30, 10), 100.0}, {hms(9, 31), 105.0}, {hms(9, 31, 0, 1), 106.0}});
    const auto g = previous_tick_grid(s, hms(0, 1), stock_session());
    EXPECT_DOUBLE_EQ(g->prices[1], 105.0);
    EXPECT_DOUBLE_EQ(g->prices[2], 106.0);
    EXPECT_EQ(g->tick_counts[1], 2u);
}

TEST(Grid, ConstantDayAndSpacing) {
    const auto s = stock_day(std::vector<double>(500, 42.0), 7000ms);
    for (Millis step : {hms(0, 1), hms(0, 5), hms(0, 0, 1), hms(0, 2)}) {
        const auto g = previous_tick_grid(s, step, stock_session());
        ASSERT_TRUE(g);
        for (double p : g->prices) EXPECT_EQ(p, 42.0);
        for (std::size_t i = 1; i < g->size(); ++i) EXPECT_EQ(g->times[i] - g->times[i - 1], step);
        EXPECT_EQ(g->size(), static_cast<std::size_t>((stock_session().close - g->times.front()) / step) + 1);
    }
}

TEST(Grid, NoLookaheadAgainstScan) {
    std::mt19937_64 rng(1);
    const auto s = brownian_day(rng, 1e-4, 3700ms);
    const auto prices = session_prices(s, PriceView::cleaned);
    const auto g = previous_tick_grid(prices, hms(0, 1), stock_session());
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_EQ(g->prices[i], scan_price(prices, g->times[i]));
    // Streaming check: truncating the future never changes the past.
    std::vector<TimedPrice> prefix(prices.begin(), prices.begin() + static_cast<long>(prices.size() / 2));
    const auto gp = previous_tick_grid(prefix, hms(0, 1), stock_session());
    for (std::size_t i = 0; i < g->size() && g->times[i] < prefix.back().time; ++i)
        EXPECT_EQ(gp->prices[i], g->prices[i]);
}

TEST(Grid, EmptyDaySignal) {
    TickSeries s{"X", ymd(2024, 3, 11), AssetClass::stock, {}};
    EXPECT_FALSE(previous_tick_grid(s, hms(0, 1), stock_session()));
    auto off = ticks({{hms(8, 0), 10.0}});
    off.records[0].flag = TickFlag::off_hours;
    EXPECT_FALSE(previous_tick_grid(off, hms(0, 1), stock_session()));
}

TEST(Grid, ViewsAndMidQuotes) {
    auto s = ticks({{hms(9, 31), 10.0}, {hms(9, 32), 50.0}, {hms(9, 33), 10.2}});
    s.records[1].flag = TickFlag::outlier;
    s.records[1].replacement = 10.1;
    EXPECT_DOUBLE_EQ(previous_tick_grid(s, hms(0, 1), stock_session(), PriceView::cleaned)->prices[2], 10.1);
    EXPECT_DOUBLE_EQ(previous_tick_grid(s, hms(0, 1), stock_session(), PriceView::raw)->prices[2], 50.0);
    s.records[1].replacement.reset();
    EXPECT_DOUBLE_EQ(previous_tick_grid(s, hms(0, 1), stock_session(), PriceView::cleaned)->prices[2], 10.0);

    auto fx = ticks({{hms(1, 0), 99.0}}, AssetClass::exchange_rate);
    fx.records[0].bid = 1.10;
    fx.records[0].ask = 1.12;
    const TradingSession day{fx.date, Millis{0}, kDayLength, AssetClass::exchange_rate, false};
    EXPECT_DOUBLE_EQ(previous_tick_grid(fx, hms(0, 1), day)->prices[0], 1.11);
}

TEST(Subsample, ShiftedStarts) {
    const auto s = stock_day(std::vector<double>(2000, 10.0), 11000ms);
    const auto grids = subsample_grids(s, stock_session());
    ASSERT_EQ(grids.size(), 5u);
    for (int j = 0; j < 5; ++j) {
        EXPECT_EQ(grids[static_cast<std::size_t>(j)].times[1], hms(9, 35 + j));
        for (double p : grids[static_cast<std::size_t>(j)].prices) EXPECT_EQ(p, 10.0);
    }
    const auto base = previous_tick_grid(s, hms(0, 5), stock_session());
    EXPECT_EQ(grids[0].prices, base->prices);
    EXPECT_EQ(grids[0].times, base->times);
    const auto one = subsample_grids(s, stock_session(), PriceView::cleaned, hms(0, 5), hms(0, 1), 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].prices, base->prices);
}

TEST(Returns, Examples) {
    EXPECT_EQ(log_returns(std::vector<double>{100, 100}), std::vector<double>{0.0});
    EXPECT_NEAR(log_returns(std::vector<double>{100, 101})[0], 0.00995033, 1e-8);
    const auto r = log_returns(std::vector<double>{100, 101, 100});
    EXPECT_NEAR(r[0] + r[1], 0.0, 1e-16);
    EXPECT_THROW(log_returns(std::vector<double>{100, 0}), std::invalid_argument);
    EXPECT_THROW(log_returns(std::vector<double>{-1, 2}), std::invalid_argument);
    EXPECT_TRUE(log_returns(std::vector<double>{5}).empty());
}

TEST(Eligibility, NeedsObservationsAndSpan) {
    // 45 ticks one minute apart: 44 minutes of activity, too short.
    std::vector<double> p(45, 10.0);
    auto s = stock_day(p, 60000ms);
    auto prices = session_prices(s, PriceView::cleaned);
    EXPECT_FALSE(is_eligible(*previous_tick_grid(prices, hms(0, 1), stock_session()), prices));
    // Many ticks over three hours but inside only 30 distinct minutes.
    s = stock_day(std::vector<double>(30, 10.0), 360000ms);
    prices = session_prices(s, PriceView::cleaned);
    EXPECT_FALSE(is_eligible(*previous_tick_grid(prices, hms(0, 1), stock_session()), prices));
    s = stock_day(std::vector<double>(41, 10.0), 180000ms);
    prices = session_prices(s, PriceView::cleaned);
    EXPECT_TRUE(is_eligible(*previous_tick_grid(prices, hms(0, 1), stock_session()), prices));
}

TEST(Ranges, PerIntervalHighLow) {
    const auto s = ticks({{hms(9, 30), 10.0}, {hms(9, 33), 11.0}, {hms(9, 35), 9.5}, {hms(9, 35, 0, 1), 12.0},
                          {hms(9, 50), 10.0}});
    const auto r = interval_ranges(session_prices(s, PriceView::raw), stock_session(), hms(0, 5));
    ASSERT_EQ(r.size(), 3u);
    EXPECT_DOUBLE_EQ(r[0].high, 11.0);
    EXPECT_DOUBLE_EQ(r[0].low, 9.5);
    EXPECT_DOUBLE_EQ(r[1].high, 12.0);
    EXPECT_DOUBLE_EQ(r[1].low, 12.0);
    EXPECT_DOUBLE_EQ(r[2].high, 10.0);
}

TEST(Synchronize, SharedTimestampsAndDegeneracy) {
    std::mt19937_64 rng(4);
    auto a = brownian_day(rng, 1e-4, 5000ms);
    auto b = brownian_day(rng, 2e-4, 13000ms);
    a.symbol = "A";
    b.symbol = "B";
    const std::vector<TickSeries> days{a, b};
    const auto cal = test_calendar();
    const auto panel = synchronize(days, cal);
    ASSERT_TRUE(panel);
    EXPECT_EQ(panel->assets(), 2);
    EXPECT_EQ(panel->intervals(), 395);
    for (int k = 0; k < 2; ++k) {
        const auto g = previous_tick_grid(days[static_cast<std::size_t>(k)], hms(0, 1), stock_session());
        const auto r = log_returns(*g);
        for (Eigen::Index i = 0; i < panel->intervals(); ++i) EXPECT_EQ(panel->returns(i, k), r[static_cast<std::size_t>(i)]);
    }
    const std::vector<TickSeries> single{a};
    const auto one = synchronize(single, cal);
    const auto r = log_returns(*previous_tick_grid(a, hms(0, 1), stock_session()));
    ASSERT_EQ(one->intervals(), static_cast<Eigen::Index>(r.size()));
    for (Eigen::Index i = 0; i < one->intervals(); ++i) EXPECT_EQ(one->returns(i, 0), r[static_cast<std::size_t>(i)]);
}

TEST(Synchronize, LimitedHoursAssetGetsZeroReturns) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z(0, 1e-4);
    TickSeries full{"ES", ymd(2024, 3, 12), AssetClass::future, {}};
    TickSeries evening{"NQ", ymd(2024, 3, 12), AssetClass::future, {}};
    double x = 0;
    double y = 0;
    for (Millis t{0}; t < kDayLength; t += 10000ms) {
        x += z(rng);
        TickRecord r;
        r.time = t;
        r.price = 100 * std::exp(x);
        r.bid = r.price;
        r.ask = r.price;
        full.records.push_back(r);
        if (t >= hms(19, 0)) {
            y += z(rng);
            r.price = 50 * std::exp(y);
            r.bid = r.ask = r.price;
            evening.records.push_back(r);
        }
    }
    const std::vector<TickSeries> days{full, evening};
    const auto panel = synchronize(days, test_calendar());
    ASSERT_TRUE(panel);
    for (Eigen::Index i = 0; i < panel->intervals(); ++i) {
        if (panel->times[static_cast<std::size_t>(i) + 1] <= hms(19, 0)) EXPECT_EQ(panel->returns(i, 1), 0.0);
    }
    EXPECT_GT(panel->returns.col(1).squaredNorm(), 0.0);
    // Padding leaves the active asset's own variance intact.
    const auto g = previous_tick_grid(full, hms(0, 1), *session_for(AssetClass::future, full.date, test_calendar()));
    double rv = 0;
    for (double r : log_returns(*g)) rv += r * r;
    EXPECT_NEAR(panel->returns.col(0).squaredNorm(), rv, 1e-18);
}

TEST(Synchronize, DisjointActivityIsEmpty) {
    auto a = ticks({{hms(9, 31), 10.0}, {hms(10, 0), 10.1}});
    auto b = ticks({{hms(11, 0), 20.0}, {hms(12, 0), 20.1}});
    const std::vector<TickSeries> days{a, b};
    EXPECT_FALSE(synchronize(days, test_calendar()));
    TickSeries empty{"E", a.date, AssetClass::stock, {}};
    const std::vector<TickSeries> with_empty{a, empty};
    EXPECT_FALSE(synchronize(with_empty, test_calendar()));
}

}  // namespace
}  // namespace rvkit
