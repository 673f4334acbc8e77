#pragma once

#include <filesystem>
#include <istream>

#include "rvkit/cleaning/outliers.hpp"
#include "rvkit/ingest/aggregate.hpp"
#include "rvkit/ingest/calendar.hpp"
#include "rvkit/measures/univariate.hpp"
#include "rvkit/sampling/grid.hpp"

namespace rvkit {

/// Everything `--config` can set. Sections of the INI file:
///   [calendar]                 version, first_supported (YYYY-MM-DD)
///   [calendar.<class id>]      holidays, early_closes: comma-separated dates
///   [cleaning]                 k, delta, gamma
///   [odd_lots]                 threshold
///   [odd_lot_overrides]        SYMBOL = threshold
///   [kernel]                   base_interval_s, noise_rv_interval_s, sparse_interval_s,
///                              sparse_offsets, c_star, jitter_width
///   [eligibility]              min_observations, min_span_minutes
///   [paths]                    raw, measures (relative paths resolve against the file's folder)
struct PipelineConfig {
    HolidayCalendar calendar;
    CleaningParams cleaning;
    OddLotOverrides odd_lots;
    KernelConfig kernel;
    EligibilityRule eligibility;
    std::filesystem::path raw_root = "data/raw";
    std::filesystem::path measure_root = "data/measures";
};

/// Throws ParseError for malformed files or values.
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// US exchange calendar for 2023 through 2026 with the default parameters.
PipelineConfig default_config();

}  // namespace rvkit
