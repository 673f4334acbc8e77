#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rvkit/cleaning/outliers.hpp"
#include "test_support.hpp"

namespace rvkit {
namespace {

using namespace testing;

// Straightforward reading of the filter: collect the neighbourhood, sort, trim, compare.
std::vector<bool> oracle_flags(const std::vector<double>& p, int k, double delta, double gamma) {
    const std::size_t n = p.size();
    const std::size_t half = static_cast<std::size_t>(k) / 2;
    std::vector<bool> out(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> idx;
        if (n < static_cast<std::size_t>(k) + 2) {
            for (std::size_t j = 0; j < n; ++j) idx.push_back(j);
        } else if (i < half) {
            for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) idx.push_back(j);
        } else if (i >= n - half) {
            for (std::size_t j = n - static_cast<std::size_t>(k) - 1; j < n; ++j) idx.push_back(j);
        } else {
            for (std::size_t j = i - half; j <= i + half; ++j) idx.push_back(j);
        }
        std::vector<double> w;
        for (auto j : idx)
            if (j != i) w.push_back(p[j]);
        std::sort(w.begin(), w.end());
        const auto trim = static_cast<std::size_t>(std::floor(static_cast<double>(w.size()) * delta / 2));
        std::vector<double> kept(w.begin() + static_cast<long>(trim), w.end() - static_cast<long>(trim));
        const double mean = std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
        double ss = 0;
        for (double v : kept) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(kept.size()));
        out[i] = std::fabs(p[i] - mean) >= 3 * sd + gamma;
    }
    return out;
}

std::vector<double> noisy_prices(std::mt19937_64& rng, std::size_t n, double spike_prob) {
    std::normal_distribution<double> z(0, 0.01);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> p(n);
    double x = 50.0;
    for (auto& v : p) {
        x += z(rng);
        // Quantize to cents so ties occur, as in real trade prices.
        v = std::round(x * 100) / 100;
        if (u(rng) < spike_prob) v += (u(rng) < 0.5 ? -1 : 1) * (0.2 + u(rng));
    }
    return p;
}

TEST(TrimmedStats, Examples) {
    const std::vector<double> flat(61, 10.0);
    auto s = trimmed_stats(flat, 0.1);
    EXPECT_DOUBLE_EQ(s.mean, 10.0);
    EXPECT_DOUBLE_EQ(s.sd, 0.0);

    std::vector<double> w(10);
    std::iota(w.begin(), w.end(), 1.0);
    std::shuffle(w.begin(), w.end(), std::mt19937_64(3));
    s = trimmed_stats(w, 0.4);
    // Survivors 3..8.
    EXPECT_DOUBLE_EQ(s.mean, 5.5);
    EXPECT_NEAR(s.sd, std::sqrt(35.0 / 12.0), 1e-14);

    const std::vector<double> one{5.0};
    s = trimmed_stats(one, 0.1);
    EXPECT_DOUBLE_EQ(s.mean, 5.0);
    EXPECT_DOUBLE_EQ(s.sd, 0.0);
    EXPECT_THROW(trimmed_stats(std::vector<double>{}, 0.1), std::invalid_argument);
}

TEST(Params, DefaultsAndValidation) {
    CleaningParams p;
    EXPECT_EQ(p.k, 60);
    EXPECT_DOUBLE_EQ(p.delta, 0.1);
    EXPECT_DOUBLE_EQ(p.gamma, 0.06);
    EXPECT_NO_THROW(p.validate());
    EXPECT_THROW((CleaningParams{3, 0.1, 0.06}.validate()), std::invalid_argument);
    EXPECT_THROW((CleaningParams{60, 1.0, 0.06}.validate()), std::invalid_argument);
    EXPECT_THROW((CleaningParams{60, 0.1, 0.0}.validate()), std::invalid_argument);
}

TEST(Neighborhood, ThreeBranches) {
    EXPECT_EQ(neighborhood_bounds(0, 200, 60), (std::pair<std::size_t, std::size_t>{0, 60}));
    EXPECT_EQ(neighborhood_bounds(29, 200, 60), (std::pair<std::size_t, std::size_t>{0, 60}));
    EXPECT_EQ(neighborhood_bounds(30, 200, 60), (std::pair<std::size_t, std::size_t>{0, 60}));
    EXPECT_EQ(neighborhood_bounds(100, 200, 60), (std::pair<std::size_t, std::size_t>{70, 130}));
    EXPECT_EQ(neighborhood_bounds(170, 200, 60), (std::pair<std::size_t, std::size_t>{139, 199}));
    EXPECT_EQ(neighborhood_bounds(199, 200, 60), (std::pair<std::size_t, std::size_t>{139, 199}));
    EXPECT_EQ(neighborhood_bounds(5, 40, 60), (std::pair<std::size_t, std::size_t>{0, 39}));
}

TEST(Detect, ConstantDayHasNoOutliers) {
    auto s = stock_day(std::vector<double>(200, 10.0));
    const auto r = detect_outliers(s, CleaningParams{});
    EXPECT_EQ(r.n_obs, 200u);
    EXPECT_EQ(r.n_outliers, 0u);
}

TEST(Detect, SingleSpike) {
    std::vector<double> p(200, 10.0);
    p[117] = 20.0;
    auto s = stock_day(p);
    const auto r = detect_outliers(s, CleaningParams{});
    ASSERT_EQ(r.n_outliers, 1u);
    EXPECT_EQ(r.outlier_indices[0], 117u);
    EXPECT_EQ(s.records[117].flag, TickFlag::outlier);
}

TEST(Detect, SpikeAtEdges) {
    for (std::size_t pos : {std::size_t{0}, std::size_t{3}, std::size_t{199}}) {
        std::vector<double> p(200, 10.0);
        p[pos] = 12.0;
        auto s = stock_day(p);
        EXPECT_EQ(detect_outliers(s, CleaningParams{}).outlier_indices, std::vector<std::size_t>{pos});
    }
}

TEST(Detect, MatchesBruteForceOracle) {
    std::mt19937_64 rng(2024);
    for (auto [n, k, delta, gamma] : {std::tuple{500, 60, 0.1, 0.06}, {61, 60, 0.1, 0.02}, {700, 20, 0.2, 0.01},
                                      {30, 60, 0.1, 0.06}, {400, 4, 0.5, 0.005}}) {
        const auto p = noisy_prices(rng, static_cast<std::size_t>(n), 0.02);
        auto s = stock_day(p);
        const auto r = detect_outliers(s, CleaningParams{k, delta, gamma});
        const auto expected = oracle_flags(p, k, delta, gamma);
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (expected[i]) want.push_back(i);
        EXPECT_EQ(r.outlier_indices, want) << "n=" << n << " k=" << k;
    }
}

TEST(Detect, SkipsOffHoursAndIsDeterministic) {
    std::mt19937_64 rng(5);
    auto p = noisy_prices(rng, 300, 0.03);
    auto s = stock_day(p);
    s.records[10].flag = TickFlag::off_hours;
    s.records[10].price = 1000.0;
    auto copy = s;
    const auto a = detect_outliers(s, CleaningParams{});
    const auto b = detect_outliers(copy, CleaningParams{});
    EXPECT_EQ(a.outlier_indices, b.outlier_indices);
    EXPECT_EQ(a.n_obs, 299u);
    EXPECT_EQ(s.records[10].flag, TickFlag::off_hours);
    EXPECT_TRUE(std::find(a.outlier_indices.begin(), a.outlier_indices.end(), 10u) == a.outlier_indices.end());
}

TEST(Detect, CountNonIncreasingInGamma) {
    std::mt19937_64 rng(99);
    const auto p = noisy_prices(rng, 2000, 0.01);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double g = 0.005; g <= 0.5; g += 0.005) {
        auto s = stock_day(p);
        const auto n = detect_outliers(s, CleaningParams{60, 0.1, g}).n_outliers;
        EXPECT_LE(n, prev) << "gamma " << g;
        prev = n;
    }
}

TEST(Detect, QuoteSeriesUntouched) {
    TickSeries fx{"EURUSD", ymd(2024, 3, 11), AssetClass::exchange_rate, {}};
    for (int i = 0; i < 100; ++i) {
        TickRecord r;
        r.time = hms(1, 0, i);
        r.price = i == 50 ? 5.0 : 1.1;
        fx.records.push_back(r);
    }
    const auto before = fx;
    const auto r = detect_outliers(fx, CleaningParams{});
    EXPECT_EQ(r.n_outliers, 0u);
    EXPECT_TRUE(same_content(fx, before));
}

TEST(Replace, FourNeighbours) {
    auto s = stock_day({10.0, 10.2, 99.0, 10.4, 10.6});
    s.records[2].flag = TickFlag::outlier;
    const auto out = replace_outliers(s);
    EXPECT_NEAR(*out.records[2].replacement, 10.3, 1e-12);
    EXPECT_EQ(out.records[2].flag, TickFlag::outlier);
    EXPECT_DOUBLE_EQ(out.records[2].price, 99.0);
}

TEST(Replace, DayStartUsesFollowingOnly) {
    auto s = stock_day({99.0, 10.0, 10.2});
    s.records[0].flag = TickFlag::outlier;
    EXPECT_NEAR(*replace_outliers(s).records[0].replacement, 10.1, 1e-12);
}

TEST(Replace, SkipsOtherOutliersAndOffHours) {
    auto s = stock_day({10.0, 10.2, 50.0, 99.0, 10.4, 77.0, 10.6});
    s.records[2].flag = TickFlag::outlier;
    s.records[3].flag = TickFlag::outlier;
    s.records[5].flag = TickFlag::off_hours;
    const auto out = replace_outliers(s);
    EXPECT_NEAR(*out.records[3].replacement, (10.0 + 10.2 + 10.4 + 10.6) / 4, 1e-12);
}

TEST(Replace, NoValidNeighbourLeavesUnreplaced) {
    auto s = stock_day({99.0});
    s.records[0].flag = TickFlag::outlier;
    EXPECT_FALSE(replace_outliers(s).records[0].replacement);
}

TEST(Replace, NoOutliersIsIdentity) {
    const auto s = stock_day({10.0, 10.1, 10.2});
    EXPECT_TRUE(same_content(replace_outliers(s), s));
}

TEST(Replace, ValidRecordsUntouchedAndBounds) {
    std::mt19937_64 rng(8);
    const auto p = noisy_prices(rng, 3000, 0.02);
    auto s = stock_day(p);
    detect_outliers(s, CleaningParams{});
    const auto out = replace_outliers(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.records[i].flag != TickFlag::outlier) {
            EXPECT_EQ(out.records[i], s.records[i]);
            continue;
        }
        std::vector<double> nb;
        for (std::size_t j = i, f = 0; j-- > 0 && f < 2;)
            if (s.records[j].flag == TickFlag::valid) nb.push_back(s.records[j].price), ++f;
        for (std::size_t j = i + 1, f = 0; j < s.size() && f < 2; ++j)
            if (s.records[j].flag == TickFlag::valid) nb.push_back(s.records[j].price), ++f;
        ASSERT_TRUE(out.records[i].replacement);
        EXPECT_GE(*out.records[i].replacement, *std::min_element(nb.begin(), nb.end()));
        EXPECT_LE(*out.records[i].replacement, *std::max_element(nb.begin(), nb.end()));
    }
}

}  // namespace
}  // namespace rvkit
