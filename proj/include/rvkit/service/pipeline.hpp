#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvkit/measures/multivariate.hpp"
#include "rvkit/measures/univariate.hpp"
#include "rvkit/service/config.hpp"

namespace rvkit {

struct IngestReport {
    std::size_t files = 0;
    std::size_t days = 0;
    std::size_t records = 0;
    std::size_t skipped_days = 0;
};

/// Parses raw text files (symbol = file stem), aggregates same-timestamp records, flags odd
/// lots for stocks and stores one day file per session under `cfg.raw_root`. Dates without a
/// session are skipped.
IngestReport ingest_files(std::span<const std::filesystem::path> files, AssetClass asset_class,
                          const PipelineConfig& cfg);

struct CleanDay {
    Date date{};
    std::size_t observations = 0;
    std::size_t outliers = 0;
};

struct CleanReport {
    std::vector<CleanDay> per_day;
    std::size_t days = 0;
    std::size_t observations = 0;
    std::size_t outliers = 0;
};

/// Runs outlier detection and replacement on stored days in [from, to] and rewrites them.
CleanReport clean_symbol(AssetClass asset_class, const std::string& symbol, const PipelineConfig& cfg,
                         std::optional<Date> from = std::nullopt, std::optional<Date> to = std::nullopt);

/// Daily rows for every eligible stored day in [from, to].
std::vector<DailyMeasures> compute_measures(AssetClass asset_class, const std::string& symbol,
                                            const PipelineConfig& cfg, std::optional<Date> from = std::nullopt,
                                            std::optional<Date> to = std::nullopt);

/// Covariance sets for dates on which every symbol has a stored day.
std::vector<CovarianceSet> compute_covariances(AssetClass asset_class, const std::vector<std::string>& symbols,
                                               const PipelineConfig& cfg, std::optional<Date> from = std::nullopt,
                                               std::optional<Date> to = std::nullopt);

/// Writes measure rows as CSV with the measure column names.
void write_measures_csv(std::ostream& out, std::span<const DailyMeasures> rows, bool header = true);

}  // namespace rvkit
