#pragma once

#include <map>
#include <span>

#include <json.hpp>

#include "rvkit/measures/univariate.hpp"
#include "rvkit/models/forecast.hpp"
#include "rvkit/service/queries.hpp"

namespace rvkit {

/// Finite doubles as numbers, NaN and infinities as null.
nlohmann::json number_or_null(double v);

/// Parameter table, fit statistics and diagnostics. No series.
nlohmann::json fit_to_json(const ModelFit& fit);
nlohmann::json forecast_to_json(const ForecastResult& fc);
nlohmann::json summary_to_json(const std::map<std::string, ParameterSummary>& summary);
nlohmann::json stats_to_json(const SummaryStats& s);

}  // namespace rvkit
