#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rvkit/common/errors.hpp"
#include "rvkit/ingest/day_store.hpp"
#include "rvkit/sampling/grid.hpp"
#include "rvkit/service/api.hpp"
#include "rvkit/service/archive.hpp"
#include "rvkit/service/config.hpp"
#include "rvkit/service/measure_store.hpp"
#include "rvkit/service/pipeline.hpp"
#include "rvkit/service/queries.hpp"
#include "rvkit/service/report.hpp"
#include "rvkit/synth/generator.hpp"

using namespace rvkit;
using nlohmann::json;

namespace {

struct Globals {
    std::string config;
    std::string raw;
    std::string store;
    std::string log_level = "warn";
};

PipelineConfig load(const Globals& g) {
    PipelineConfig cfg = g.config.empty() ? default_config() : load_config(g.config);
    if (!g.raw.empty()) cfg.raw_root = g.raw;
    if (!g.store.empty()) cfg.measure_root = g.store;
    return cfg;
}

AssetClass class_of(const std::string& s) {
    auto c = parse_asset_class(s);
    if (!c) throw std::invalid_argument("unknown asset class '" + s + "' (stocks, exchange_rates, futures)");
    return *c;
}

std::optional<Date> opt_date(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_date(s);
}

/// Writes to `path`, or stdout for "" and "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::vector<std::string> symbols_or_all(const std::vector<std::string>& given, const PipelineConfig& cfg,
                                        AssetClass c) {
    if (!given.empty()) return given;
    auto all = list_symbols(cfg.raw_root, c);
    if (all.empty()) throw std::invalid_argument("no stored symbols for " + std::string(asset_class_id(c)));
    return all;
}

struct FitArgs {
    std::vector<std::string> symbols;
    std::string measure = "rv5";
    std::string model = "har";
    std::string from;
    std::string to;
    std::string out;
    bool batch = false;
    int jobs = 0;
    std::size_t horizon = kMaxHorizon;
};

ModelSpec spec_of(const FitArgs& a) {
    const auto family = parse_model_family(a.model);
    if (!family) throw std::invalid_argument("unknown model '" + a.model + "' (har, harq, mem11, amem11, amem21)");
    if (!is_measure_name(a.measure)) throw std::invalid_argument("unknown measure '" + a.measure + "'");
    return {*family, a.measure};
}

/// Estimation window bounds: the stored range unless given.
std::pair<Date, Date> window_of(const std::vector<DailyMeasures>& rows, const FitArgs& a) {
    if (rows.empty()) throw InsufficientDataError("no stored rows");
    return {opt_date(a.from).value_or(rows.front().date), opt_date(a.to).value_or(rows.back().date)};
}

json run_estimate(const MeasureSnapshot& snap, const std::string& symbol, const FitArgs& a, bool with_forecast) {
    const auto* rows = snap.series(symbol);
    if (rows == nullptr) throw std::invalid_argument("no measures stored for " + symbol);
    const auto [from, to] = window_of(*rows, a);
    const auto est = estimate(*rows, spec_of(a), from, to, a.horizon);
    json out = {{"symbol", symbol}, {"from", format_date(from)}, {"to", format_date(to)}, {"fit", fit_to_json(est.fit)}};
    if (with_forecast) {
        out["forecast"] = est.forecast ? forecast_to_json(*est.forecast) : json(nullptr);
        if (!est.forecast) {
            out["notice"] = fmt::format("forecast omitted: {} observations after the window, at least {} needed",
                                        est.later_rows, kMinHorizon);
        }
    }
    return out;
}

/// Independent fits run on a small thread pool; failures are reported per symbol.
json run_batch(const MeasureSnapshot& snap, const FitArgs& a, const std::vector<std::string>& symbols) {
    const ModelSpec spec = spec_of(a);
    const std::size_t workers =
        a.jobs > 0 ? static_cast<std::size_t>(a.jobs) : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::optional<ModelFit>> fits(symbols.size());
    std::vector<std::string> errors(symbols.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < symbols.size(); i = next++) {
            try {
                const auto* rows = snap.series(symbols[i]);
                if (rows == nullptr) throw std::invalid_argument("no measures stored");
                const auto [from, to] = window_of(*rows, a);
                const auto window = rows_in(*rows, from, to);
                if (window.size() < kMinEstimationObs) {
                    throw InsufficientDataError(fmt::format("{} observations, at least {} needed", window.size(),
                                                            kMinEstimationObs));
                }
                fits[i] = fit_model(model_data_from_rows(window, spec), spec);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, symbols.size()); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    json out = {{"family", std::string(to_string(spec.family))}, {"measure", spec.measure}};
    json per = json::array();
    json failures = json::array();
    std::vector<ModelFit> ok;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (fits[i]) {
            per.push_back({{"symbol", symbols[i]}, {"fit", fit_to_json(*fits[i])}});
            ok.push_back(*fits[i]);
        } else {
            failures.push_back({{"symbol", symbols[i]}, {"error", errors[i]}});
        }
    }
    out["fits"] = per;
    out["failures"] = failures;
    out["summary"] = summarize_fits(ok).empty() ? json::object() : summary_to_json(summarize_fits(ok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rvkit: tick data to realized measures and volatility models"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "INI file with calendars, cleaning and kernel parameters");
    app.add_option("--raw", g.raw, "Raw day-file root (overrides the config)");
    app.add_option("--store", g.store, "Measure store root (overrides the config)");
    app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error")->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse raw tick files into per-day files");
    std::string cls;
    std::vector<std::string> files;
    ingest->add_option("--class", cls, "stocks, exchange_rates or futures")->required();
    ingest->add_option("files", files, "Tick text files; the symbol is the file stem")->required();

    // clean
    auto* clean = app.add_subcommand("clean", "Detect and replace outliers in stored days");
    std::vector<std::string> symbols;
    std::string from, to, report;
    std::optional<int> k;
    std::optional<double> delta, gamma;
    clean->add_option("--class", cls)->required();
    clean->add_option("--symbol", symbols, "Symbols (default: all stored)");
    clean->add_option("--from", from);
    clean->add_option("--to", to);
    clean->add_option("--k", k, "Neighbourhood size");
    clean->add_option("--delta", delta, "Trimmed proportion");
    clean->add_option("--gamma", gamma, "Granularity in price units");
    clean->add_option("--report", report, "CSV with symbol,date,n_obs,n_outliers");

    // sample
    auto* sample = app.add_subcommand("sample", "Previous-tick grid of one stored day");
    std::string symbol, date, out, view = "cleaned";
    int interval_s = 300, offset_s = 0;
    sample->add_option("--class", cls)->required();
    sample->add_option("--symbol", symbol)->required();
    sample->add_option("--date", date)->required();
    sample->add_option("--interval", interval_s, "Seconds")->capture_default_str();
    sample->add_option("--offset", offset_s, "Seconds after the open")->capture_default_str();
    sample->add_option("--view", view, "cleaned or raw")->capture_default_str();
    sample->add_option("--out", out);

    // measures
    auto* measures = app.add_subcommand("measures", "Daily realized measures into the store");
    bool no_store = false;
    measures->add_option("--class", cls)->required();
    measures->add_option("--symbol", symbols);
    measures->add_option("--from", from);
    measures->add_option("--to", to);
    measures->add_option("--out", out, "Also write CSV ('-' for stdout)");
    measures->add_flag("--no-store", no_store, "Do not write to the measure store");

    // covariances
    auto* covs = app.add_subcommand("covariances", "Daily realized covariance matrices");
    covs->add_option("--class", cls)->required();
    covs->add_option("--symbol", symbols, "Assets of the panel (default: all stored)");
    covs->add_option("--from", from);
    covs->add_option("--to", to);
    covs->add_option("--out", out, "Also write CSV ('-' for stdout)");
    covs->add_flag("--no-store", no_store);

    // fit / forecast
    FitArgs fa;
    auto add_fit_options = [&](CLI::App* c) {
        c->add_option("--symbol", fa.symbols)->required();
        c->add_option("--measure", fa.measure)->capture_default_str();
        c->add_option("--model", fa.model, "har, harq, mem11, amem11, amem21")->capture_default_str();
        c->add_option("--from", fa.from, "Estimation start (default: first stored day)");
        c->add_option("--to", fa.to, "Estimation end (default: last stored day)");
        c->add_option("--out", fa.out, "JSON report path (default stdout)");
    };
    auto* fit = app.add_subcommand("fit", "Estimate a volatility model");
    add_fit_options(fit);
    fit->add_flag("--batch", fa.batch, "Fit every symbol and add the cross-sectional summary");
    fit->add_option("--jobs", fa.jobs, "Parallel fits in batch mode (default: cores)");
    auto* fc = app.add_subcommand("forecast", "Estimate, then forecast the days after the window");
    add_fit_options(fc);
    fc->add_option("--horizon", fa.horizon, "Maximum horizon, 5 to 22")->capture_default_str();

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "HTTP API for the dashboard");
    std::string host = "127.0.0.1";
    int port = 8080;
    int timeout_s = 60;
    serve_cmd->add_option("--host", host)->capture_default_str();
    serve_cmd->add_option("--port", port)->capture_default_str();
    serve_cmd->add_option("--timeout", timeout_s, "Estimation timeout in seconds")->capture_default_str();

    // export
    auto* exp = app.add_subcommand("export", "Bulk archive (tar) with CSV files and README");
    std::string kind = "variance";
    exp->add_option("--class", cls)->required();
    exp->add_option("--kind", kind, "variance or covariance")->capture_default_str();
    exp->add_option("--out", out)->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic tick corpus");
    CorpusSpec cs;
    std::string outdir;
    synth->add_option("--class", cls)->required();
    synth->add_option("--symbol", cs.symbols)->required();
    synth->add_option("--from", from)->required();
    synth->add_option("--to", to)->required();
    synth->add_option("--out", outdir)->required();
    synth->add_option("--seed", cs.seed)->capture_default_str();
    synth->add_option("--daily-variance", cs.ticks.daily_variance)->capture_default_str();
    synth->add_option("--mean-gap", cs.ticks.mean_gap_s, "Seconds between ticks")->capture_default_str();
    synth->add_option("--noise", cs.ticks.noise_sd, "Log-price noise sd")->capture_default_str();
    synth->add_option("--jumps", cs.ticks.jumps, "Jumps per day")->capture_default_str();
    synth->add_option("--jump-size", cs.ticks.jump_size)->capture_default_str();
    synth->add_option("--spike-share", cs.ticks.spike_share)->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(g.log_level));

    try {
        const PipelineConfig cfg = load(g);
        if (*ingest) {
            std::vector<std::filesystem::path> paths(files.begin(), files.end());
            const auto r = ingest_files(paths, class_of(cls), cfg);
            fmt::print("files={} days={} records={} skipped_days={}\n", r.files, r.days, r.records, r.skipped_days);
        } else if (*clean) {
            PipelineConfig c = cfg;
            if (k) c.cleaning.k = *k;
            if (delta) c.cleaning.delta = *delta;
            if (gamma) c.cleaning.gamma = *gamma;
            c.cleaning.validate();
            const AssetClass ac = class_of(cls);
            std::string csv = "symbol,date,n_obs,n_outliers\n";
            for (const auto& s : symbols_or_all(symbols, c, ac)) {
                const auto r = clean_symbol(ac, s, c, opt_date(from), opt_date(to));
                for (const auto& d : r.per_day) {
                    csv += fmt::format("{},{},{},{}\n", s, format_date(d.date), d.observations, d.outliers);
                }
                fmt::print(stderr, "{}: days={} observations={} outliers={}\n", s, r.days, r.observations, r.outliers);
            }
            if (!report.empty()) emit(report, csv);
        } else if (*sample) {
            const AssetClass ac = class_of(cls);
            const Date d = parse_date(date);
            const auto session = session_for(ac, d, cfg.calendar);
            if (!session) throw std::invalid_argument(date + " has no trading session");
            const auto day = load_day(cfg.raw_root, ac, symbol, d);
            if (!day) throw std::invalid_argument("no stored day for " + symbol + " on " + date);
            if (view != "cleaned" && view != "raw") throw std::invalid_argument("--view must be cleaned or raw");
            const auto grid = previous_tick_grid(*day, Millis{interval_s * 1000LL}, *session,
                                                 view == "raw" ? PriceView::raw : PriceView::cleaned,
                                                 Millis{offset_s * 1000LL});
            if (!grid) throw InsufficientDataError("no usable prices on " + date);
            std::string csv = "time,price,ticks\n";
            for (std::size_t i = 0; i < grid->size(); ++i) {
                csv += fmt::format("{},{:.10g},{}\n", format_time_of_day(grid->times[i]), grid->prices[i],
                                   grid->tick_counts[i]);
            }
            emit(out, csv);
        } else if (*measures) {
            const AssetClass ac = class_of(cls);
            MeasureStore store(cfg.measure_root);
            std::vector<DailyMeasures> all;
            for (const auto& s : symbols_or_all(symbols, cfg, ac)) {
                auto rows = compute_measures(ac, s, cfg, opt_date(from), opt_date(to));
                fmt::print(stderr, "{}: {} rows\n", s, rows.size());
                all.insert(all.end(), rows.begin(), rows.end());
            }
            if (!no_store) store.write_measures(ac, all);
            if (!out.empty()) {
                std::ostringstream csv;
                write_measures_csv(csv, all);
                emit(out, csv.str());
            }
        } else if (*covs) {
            const AssetClass ac = class_of(cls);
            const auto syms = symbols_or_all(symbols, cfg, ac);
            const auto sets = compute_covariances(ac, syms, cfg, opt_date(from), opt_date(to));
            fmt::print(stderr, "{} covariance days over {} assets\n", sets.size(), syms.size());
            if (!no_store) MeasureStore(cfg.measure_root).write_covariances(ac, sets);
            if (!out.empty()) {
                std::ostringstream csv;
                write_covariance_csv(csv, sets);
                emit(out, csv.str());
            }
        } else if (*fit || *fc) {
            MeasureStore store(cfg.measure_root);
            const auto snap = store.snapshot();
            json result;
            if (*fit && (fa.batch || fa.symbols.size() > 1)) {
                result = run_batch(*snap, fa, fa.symbols);
            } else {
                result = run_estimate(*snap, fa.symbols.front(), fa, static_cast<bool>(*fc));
            }
            emit(fa.out, result.dump(2) + "\n");
        } else if (*serve_cmd) {
            auto store = std::make_shared<MeasureStore>(cfg.measure_root);
            ApiOptions opt;
            opt.estimate_timeout = std::chrono::seconds{timeout_s};
            serve(Api(store, opt), host, port);
        } else if (*exp) {
            const auto k2 = parse_archive_kind(kind);
            if (!k2) throw std::invalid_argument("--kind must be variance or covariance");
            MeasureStore store(cfg.measure_root);
            const auto bytes = build_archive(*store.snapshot(), class_of(cls), *k2);
            if (!bytes) throw std::invalid_argument("nothing stored for " + cls);
            emit(out, *bytes);
        } else if (*synth) {
            cs.asset_class = class_of(cls);
            cs.from = parse_date(from);
            cs.to = parse_date(to);
            const auto paths = write_corpus(outdir, cs, cfg.calendar);
            for (const auto& p : paths) fmt::print("{}\n", p.string());
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
