#include "rvkit/service/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <ostream>

#include "rvkit/cleaning/outliers.hpp"
#include "rvkit/ingest/aggregate.hpp"
#include "rvkit/ingest/day_store.hpp"
#include "rvkit/ingest/tick_parser.hpp"
#include "rvkit/sampling/grid.hpp"

namespace rvkit {

namespace {

bool in_range(Date d, std::optional<Date> from, std::optional<Date> to) {
    return (!from || d >= *from) && (!to || d <= *to);
}

std::optional<TradingSession> safe_session(AssetClass c, Date d, const HolidayCalendar& cal) {
    try {
        return session_for(c, d, cal);
    } catch (const std::out_of_range& e) {
        spdlog::warn("{}: {}", format_date(d), e.what());
        return std::nullopt;
    }
}

std::string fmt_value(double v) { return std::isnan(v) ? std::string() : fmt::format("{:.17g}", v); }

}  // namespace

IngestReport ingest_files(std::span<const std::filesystem::path> files, AssetClass asset_class,
                          const PipelineConfig& cfg) {
    IngestReport rep;
    for (const auto& path : files) {
        auto days = parse_tick_file_days(path, asset_class, cfg.calendar);
        ++rep.files;
        for (auto& day : days) {
            const auto session = safe_session(asset_class, day.date, cfg.calendar);
            if (!session) {
                spdlog::info("{} {}: no trading session, day skipped", day.symbol, format_date(day.date));
                ++rep.skipped_days;
                continue;
            }
            TickSeries agg = aggregate_same_timestamp(day);
            if (asset_class == AssetClass::stock) agg = flag_odd_lots(agg, cfg.odd_lots.rule_for(agg.symbol));
            store_day(agg, cfg.raw_root);
            ++rep.days;
            rep.records += agg.size();
        }
    }
    return rep;
}

CleanReport clean_symbol(AssetClass asset_class, const std::string& symbol, const PipelineConfig& cfg,
                         std::optional<Date> from, std::optional<Date> to) {
    CleanReport rep;
    for (Date d : list_days(cfg.raw_root, asset_class, symbol)) {
        if (!in_range(d, from, to)) continue;
        auto day = load_day(cfg.raw_root, asset_class, symbol, d);
        if (!day) continue;
        apply_session_flags(*day, safe_session(asset_class, d, cfg.calendar));
        const auto r = detect_outliers(*day, cfg.cleaning);
        const TickSeries cleaned = replace_outliers(*day);
        store_day(cleaned, cfg.raw_root);
        ++rep.days;
        rep.per_day.push_back({d, r.n_obs, r.n_outliers});
        rep.observations += r.n_obs;
        rep.outliers += r.n_outliers;
    }
    return rep;
}

std::vector<DailyMeasures> compute_measures(AssetClass asset_class, const std::string& symbol,
                                            const PipelineConfig& cfg, std::optional<Date> from,
                                            std::optional<Date> to) {
    std::vector<DailyMeasures> rows;
    for (Date d : list_days(cfg.raw_root, asset_class, symbol)) {
        if (!in_range(d, from, to)) continue;
        const auto session = safe_session(asset_class, d, cfg.calendar);
        if (!session) continue;
        const auto day = load_day(cfg.raw_root, asset_class, symbol, d);
        if (!day) continue;
        auto row = daily_row(*day, *session, cfg.kernel, cfg.eligibility);
        if (row) {
            rows.push_back(std::move(*row));
        } else {
            spdlog::info("{} {}: not eligible for measures", symbol, format_date(d));
        }
    }
    return rows;
}

std::vector<CovarianceSet> compute_covariances(AssetClass asset_class, const std::vector<std::string>& symbols,
                                               const PipelineConfig& cfg, std::optional<Date> from,
                                               std::optional<Date> to) {
    std::vector<CovarianceSet> out;
    if (symbols.empty()) return out;
    std::vector<Date> dates = list_days(cfg.raw_root, asset_class, symbols.front());
    for (Date d : dates) {
        if (!in_range(d, from, to)) continue;
        const auto session = safe_session(asset_class, d, cfg.calendar);
        if (!session) continue;
        std::vector<TickSeries> days;
        for (const auto& s : symbols) {
            auto day = load_day(cfg.raw_root, asset_class, s, d);
            if (!day) break;
            days.push_back(std::move(*day));
        }
        if (days.size() != symbols.size()) {
            spdlog::info("{}: not every asset has data, covariance skipped", format_date(d));
            continue;
        }
        const auto panel = synchronize(days, cfg.calendar);
        if (!panel) {
            spdlog::info("{}: assets do not overlap, covariance skipped", format_date(d));
            continue;
        }
        out.push_back(covariance_set(*panel));
    }
    return out;
}

void write_measures_csv(std::ostream& out, std::span<const DailyMeasures> rows, bool header) {
    if (header) {
        out << "symbol,date,open,high,low,close,volume,trades";
        for (auto n : measure_names()) out << ',' << n;
        out << '\n';
    }
    for (const auto& r : rows) {
        out << r.symbol << ',' << format_date(r.date) << ',' << fmt_value(r.open) << ',' << fmt_value(r.high) << ','
            << fmt_value(r.low) << ',' << fmt_value(r.close) << ',';
        if (r.volume) out << *r.volume;
        out << ',';
        if (r.trades) out << *r.trades;
        for (auto n : measure_names()) out << ',' << fmt_value(*r.get(n));
        out << '\n';
    }
}

}  // namespace rvkit
