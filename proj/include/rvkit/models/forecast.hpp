#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvkit/models/types.hpp"

namespace rvkit {

struct ForecastResult {
    std::size_t horizon = 0;
    std::vector<double> point;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::vector<double> actuals;
    double mse = 0.0;
    /// Absent when some forecast is not positive.
    std::optional<double> qlike;
};

/// Sample quantile with linear interpolation between order statistics (Hyndman-Fan type 7).
double empirical_quantile(std::vector<double> v, double q);

double mse_loss(std::span<const double> actual, std::span<const double> forecast);
/// Absent when any forecast or actual is not positive.
std::optional<double> qlike_loss(std::span<const double> actual, std::span<const double> forecast);

/// Sequential one-step forecasts for t = n_obs .. n_obs + H - 1 with parameters held fixed.
/// `data` holds the estimation window followed by later observations; H = min(later, max_h).
/// Throws InsufficientDataError with fewer than five later observations.
ForecastResult forecast(const ModelFit& fit, const ModelData& data, std::size_t max_h = kMaxHorizon);

/// Cross-sectional summary of one parameter over many fits.
struct ParameterSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    double pct_significant = 0.0;
};

/// Per-parameter summary over fits of one family; significance at `level` on the p-values.
std::map<std::string, ParameterSummary> summarize_fits(std::span<const ModelFit> fits, double level = 0.05);

}  // namespace rvkit
