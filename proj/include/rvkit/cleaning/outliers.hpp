#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rvkit/ingest/types.hpp"

namespace rvkit {

/// Neighborhood outlier filter settings; defaults are the production configuration.
struct CleaningParams {
    int k = 60;            ///< neighborhood size, even, >= 4
    double delta = 0.1;    ///< trimmed proportion, split equally between tails
    double gamma = 0.06;   ///< granularity, in price units

    /// Throws std::invalid_argument when out of range.
    void validate() const;
};

struct CleaningReport {
    std::size_t n_obs = 0;
    std::size_t n_outliers = 0;
    std::vector<std::size_t> outlier_indices;  ///< positions in the series' records
};

struct TrimmedStats {
    double mean = 0.0;
    double sd = 0.0;  ///< population standard deviation of the survivors
};

/// Drops floor(n * delta / 2) values from each tail after sorting.
TrimmedStats trimmed_stats(std::span<const double> window, double delta);

/// Flags in-session prices far from their trimmed neighborhood:
/// |p_i - mean_i| >= 3 sd_i + gamma. Exchange-rate and futures series are returned untouched
/// with an empty report. Previously flagged outliers are re-evaluated from scratch.
CleaningReport detect_outliers(TickSeries& series, const CleaningParams& params);

/// Neighborhood bounds [first, last] (inclusive, positions among in-session observations)
/// used for observation i of n; the observation itself is excluded by the caller.
std::pair<std::size_t, std::size_t> neighborhood_bounds(std::size_t i, std::size_t n, int k);

/// Sets `replacement` on every outlier to the mean of up to two preceding and two following
/// valid in-session prices. Outliers without any valid neighbor keep no replacement.
TickSeries replace_outliers(const TickSeries& series);

}  // namespace rvkit
