#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvkit/measures/univariate.hpp"
#include "rvkit/models/forecast.hpp"
#include "rvkit/models/types.hpp"

namespace rvkit {

struct DateWindow {
    Date from{};
    Date to{};
};

/// [today - 13 months, today - 1 month].
DateWindow default_window(Date today);

/// Rows with from <= date <= to; `rows` must be sorted by date.
std::span<const DailyMeasures> rows_in(std::span<const DailyMeasures> rows, Date from, Date to);

/// Model input on the family's estimation scale: daily variance for HAR, annualized volatility
/// for MEM. AMEM signs come from close-to-close log returns; the first row counts as non-negative.
/// Throws std::invalid_argument for unknown measures and rows where the measure is missing.
ModelData model_data_from_rows(std::span<const DailyMeasures> rows, const ModelSpec& spec);

/// Annualized volatility of a model-scale value (HAR values are floored at zero first).
double to_plot_scale(ModelFamily family, double value);

struct SummaryStats {
    std::optional<double> avg_vol;
    std::optional<double> vol_of_vol;
    std::optional<double> avg_return;
    std::optional<double> avg_volume;
};

/// Window statistics of the annualized measure. vol_of_vol is the population standard deviation;
/// avg_return averages log(C_t / C_{t-1}) over consecutive rows inside the window.
SummaryStats summary_stats(std::span<const DailyMeasures> rows, const std::string& measure, bool include_volume);

/// Fit of the chosen family on `window`, and the forecast over the rows after it when at least
/// five exist.
struct EstimationResult {
    ModelFit fit;
    std::optional<ForecastResult> forecast;
    std::size_t later_rows = 0;
};

/// `all` sorted by date; the estimation window is [from, to]. The forecast covers at most `max_h`
/// later rows. Throws InsufficientDataError when the window holds fewer than 750 rows.
EstimationResult estimate(std::span<const DailyMeasures> all, const ModelSpec& spec, Date from, Date to,
                          std::size_t max_h = kMaxHorizon);

ModelFit fit_model(const ModelData& data, const ModelSpec& spec);

}  // namespace rvkit
