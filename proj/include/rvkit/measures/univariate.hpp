#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rvkit/ingest/types.hpp"
#include "rvkit/sampling/grid.hpp"

namespace rvkit {

struct RangeMeasures {
    double pr = 0.0;
    double gkr = 0.0;
    double rr = 0.0;
};

/// Daily ranges from H, L, O, C and per-interval highs/lows. Throws std::invalid_argument when
/// H < L or any price is non-positive.
RangeMeasures range_measures(double high, double low, double open, double close,
                             std::span<const PriceRange> intervals);

/// Measures defined on one return series. medrv needs m >= 3, minrv m >= 2.
struct ReturnMeasures {
    double rv = 0.0;
    double rq = 0.0;
    double bv = 0.0;
    double rsp = 0.0;
    double rsn = 0.0;
    std::optional<double> medrv;
    std::optional<double> minrv;
};

/// nullopt when m < 2.
std::optional<ReturnMeasures> return_based_measures(std::span<const double> r);

double realized_variance(std::span<const double> r);
double realized_quarticity(std::span<const double> r);
double bipower_variation(std::span<const double> r);

enum class ReturnMeasure { rv, rq, bv, rsp, rsn, medrv, minrv };
std::optional<double> pick(const ReturnMeasures& m, ReturnMeasure which);

/// Mean of a measure over several grids; grids too short for the measure are skipped.
std::optional<double> subsampled_measure(std::span<const RegularGrid> grids, ReturnMeasure which);

/// Parzen weight; x must be non-negative.
double parzen_kernel(double x);

/// (k''(0)^2 / k_{0,0})^(1/5) for the Parzen kernel, with k_{0,0} rounded to 0.269.
inline const double kParzenCStar = std::pow(144.0 / 0.269, 0.2);

struct KernelConfig {
    Millis base_interval = hms(0, 0, 1);
    Millis noise_rv_interval = hms(0, 2);
    Millis sparse_interval = hms(0, 20);
    int sparse_offsets = 1200;
    double c_star = kParzenCStar;
    int jitter_width = 2;
};

/// RV on `coarse` divided by twice the number of non-zero returns on `base`; 0 when there are none.
double noise_variance(std::span<const double> base_prices, std::span<const double> coarse_prices);

/// Average of the sparse RVs on grids that start `j` base steps after the open (j < offsets) and
/// step `stride` base steps. Falls back to the base-grid RV when the grid is shorter than one stride.
double sparse_iv(std::span<const double> base_prices, int stride, int offsets);

struct KernelResult {
    double rk = 0.0;
    int bandwidth = 1;
    double bandwidth_star = 0.0;
    double noise_variance = 0.0;
    double iv = 0.0;
    std::size_t m = 0;
};

/// Parzen realized kernel with bandwidth c* xi^(4/5) m^(3/5), rounded and clamped to [1, m - 1].
/// `jittered_returns` are the base-grid returns after end-point averaging.
KernelResult realized_kernel(std::span<const double> jittered_returns, double omega2, double iv,
                             double c_star = kParzenCStar);

/// Full pipeline from a day's prices: base, 2-minute and sparse grids, jittering, bandwidth.
/// nullopt when the base grid has fewer than two points.
std::optional<KernelResult> realized_kernel(std::span<const TimedPrice> prices, const TradingSession& session,
                                            const KernelConfig& cfg = {});

/// Replaces the first and last price by the mean of the first (last) `width` prices.
std::vector<double> jitter_endpoints(std::span<const double> prices, int width);

/// One output row per eligible symbol-day. Absent values are NaN.
struct DailyMeasures {
    std::string symbol;
    Date date{};
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    std::optional<std::int64_t> volume;
    std::optional<std::int64_t> trades;

    double pr = NAN, gkr = NAN, rr5 = NAN;
    double rv1 = NAN, rv5 = NAN, rv5_ss = NAN;
    double rq1 = NAN, rq5 = NAN, rq5_ss = NAN;
    double bv1 = NAN, bv5 = NAN, bv5_ss = NAN;
    double rsp1 = NAN, rsp5 = NAN, rsp5_ss = NAN;
    double rsn1 = NAN, rsn5 = NAN, rsn5_ss = NAN;
    double medrv1 = NAN, medrv5 = NAN, medrv5_ss = NAN;
    double minrv1 = NAN, minrv5 = NAN, minrv5_ss = NAN;
    double rk = NAN;
    int rk_bandwidth = 0;

    /// Measure value by column name; nullopt for unknown names.
    [[nodiscard]] std::optional<double> get(std::string_view name) const;
    bool set(std::string_view name, double value);
};

/// Column names of the realized measures, in output order.
const std::array<std::string_view, 25>& measure_names();
bool is_measure_name(std::string_view name);

/// Table row for one day, or nullopt when the day is not eligible. Prices come from the
/// cleaned view; O and C skip odd lots, H and L use every tick.
std::optional<DailyMeasures> daily_row(const TickSeries& series, const TradingSession& session,
                                       const KernelConfig& cfg = {}, const EligibilityRule& rule = {});

}  // namespace rvkit
