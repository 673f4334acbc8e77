#include "rvkit/cleaning/outliers.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rvkit {

void CleaningParams::validate() const {
    if (k < 4 || k % 2 != 0) throw std::invalid_argument("cleaning k must be an even integer >= 4");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("cleaning delta must lie in (0, 1)");
    if (!(gamma > 0.0)) throw std::invalid_argument("cleaning gamma must be positive");
}

namespace {

std::size_t trim_count(std::size_t n, double delta) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * delta / 2.0));
}

// Mean and population sd after trimming, with sorted[skip] removed first (skip >= size: none).
TrimmedStats survivor_stats(std::span<const double> sorted, std::size_t skip, std::size_t trim) {
    const std::size_t n = sorted.size() - (skip < sorted.size() ? 1 : 0);
    if (n <= 2 * trim) throw std::logic_error("trimming removed every observation");
    const std::size_t count = n - 2 * trim;
    double sum = 0;
    // Walk the logical (self-removed) order: logical j maps to physical j or j+1.
    auto at = [&](std::size_t j) { return sorted[j < skip ? j : j + 1]; };
    for (std::size_t j = trim; j < n - trim; ++j) sum += at(j);
    const double mean = sum / static_cast<double>(count);
    double ss = 0;
    for (std::size_t j = trim; j < n - trim; ++j) {
        const double d = at(j) - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(count))};
}

}  // namespace

TrimmedStats trimmed_stats(std::span<const double> window, double delta) {
    if (window.empty()) throw std::invalid_argument("trimmed_stats needs a non-empty window");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
    std::vector<double> sorted(window.begin(), window.end());
    std::sort(sorted.begin(), sorted.end());
    return survivor_stats(sorted, sorted.size(), trim_count(sorted.size(), delta));
}

std::pair<std::size_t, std::size_t> neighborhood_bounds(std::size_t i, std::size_t n, int k) {
    const auto kk = static_cast<std::size_t>(k);
    const std::size_t half = kk / 2;
    if (n < kk + 2) return {0, n - 1};
    if (i < half) return {0, kk};
    if (i >= n - half) return {n - kk - 1, n - 1};
    return {i - half, i + half};
}

CleaningReport detect_outliers(TickSeries& series, const CleaningParams& params) {
    params.validate();
    CleaningReport report;
    if (series.asset_class != AssetClass::stock) return report;

    std::vector<std::size_t> pos;  // in-session record positions
    pos.reserve(series.records.size());
    for (std::size_t r = 0; r < series.records.size(); ++r) {
        auto& rec = series.records[r];
        if (!rec.in_session()) continue;
        rec.flag = TickFlag::valid;
        rec.replacement.reset();
        pos.push_back(r);
    }
    const std::size_t n = pos.size();
    report.n_obs = n;
    if (n < 2) return report;

    std::vector<double> price(n);
    for (std::size_t j = 0; j < n; ++j) price[j] = series.records[pos[j]].price;

    // Sorted copy of the current window [lo, hi] (self included), slid incrementally.
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(params.k) + 2);
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool started = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [a, b] = neighborhood_bounds(i, n, params.k);
        if (!started) {
            window.assign(price.begin() + static_cast<std::ptrdiff_t>(a),
                          price.begin() + static_cast<std::ptrdiff_t>(b) + 1);
            std::sort(window.begin(), window.end());
            lo = a;
            hi = b;
            started = true;
        }
        while (hi < b) {
            ++hi;
            window.insert(std::upper_bound(window.begin(), window.end(), price[hi]), price[hi]);
        }
        while (lo < a) {
            window.erase(std::lower_bound(window.begin(), window.end(), price[lo]));
            ++lo;
        }
        // Equal values are interchangeable, so skipping the first copy of p_i is exact.
        const auto self = static_cast<std::size_t>(
            std::lower_bound(window.begin(), window.end(), price[i]) - window.begin());
        const std::size_t len = window.size() - 1;
        const auto stats = survivor_stats(window, self, trim_count(len, params.delta));
        if (std::fabs(price[i] - stats.mean) >= 3.0 * stats.sd + params.gamma) {
            series.records[pos[i]].flag = TickFlag::outlier;
            report.outlier_indices.push_back(pos[i]);
        }
    }
    report.n_outliers = report.outlier_indices.size();
    return report;
}

TickSeries replace_outliers(const TickSeries& series) {
    TickSeries out = series;
    auto& recs = out.records;
    std::size_t unreplaced = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].flag != TickFlag::outlier) continue;
        double sum = 0;
        double lo = 0;
        double hi = 0;
        int used = 0;
        auto take = [&](double p) {
            lo = used == 0 ? p : std::min(lo, p);
            hi = used == 0 ? p : std::max(hi, p);
            sum += p;
            ++used;
        };
        int found = 0;
        for (std::size_t j = i; j-- > 0 && found < 2;) {
            if (recs[j].flag == TickFlag::valid) {
                take(recs[j].price);
                ++found;
            }
        }
        found = 0;
        for (std::size_t j = i + 1; j < recs.size() && found < 2; ++j) {
            if (recs[j].flag == TickFlag::valid) {
                take(recs[j].price);
                ++found;
            }
        }
        if (used == 0) {
            recs[i].replacement.reset();
            ++unreplaced;
        } else {
            recs[i].replacement = std::clamp(sum / used, lo, hi);
        }
    }
    if (unreplaced > 0) {
        spdlog::warn("{} {}: {} outliers without valid neighbours left unreplaced", series.symbol,
                     format_date(series.date), unreplaced);
    }
    return out;
}

}  // namespace rvkit
