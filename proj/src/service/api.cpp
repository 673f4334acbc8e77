#include "rvkit/service/api.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <future>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "rvkit/common/errors.hpp"
#include "rvkit/models/forecast.hpp"
#include "rvkit/service/archive.hpp"
#include "rvkit/service/catalogue.hpp"
#include "rvkit/service/queries.hpp"
#include "rvkit/service/report.hpp"

namespace rvkit {

using nlohmann::json;

namespace {

constexpr std::array kClasses{AssetClass::stock, AssetClass::exchange_rate, AssetClass::future};

/// Client-side problem; carries the status and error code of the response.
struct RequestError : std::runtime_error {
    RequestError(int s, std::string c, const std::string& m) : std::runtime_error(m), status(s), code(std::move(c)) {}
    int status;
    std::string code;
};

HttpResponse json_response(const json& body, int status = 200) {
    HttpResponse r;
    r.status = status;
    r.body = body.dump();
    return r;
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const std::size_t j = path.find('/', i);
        const std::size_t end = j == std::string_view::npos ? path.size() : j;
        if (end > i) out.push_back(path.substr(i, end - i));
        i = end;
    }
    return out;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i <= s.size()) {
        const std::size_t j = std::min(s.find(',', i), s.size());
        std::string item(s.substr(i, j - i));
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(std::move(item));
        i = j + 1;
    }
    return out;
}

std::string valid_measures_text() { return fmt::format("{}", fmt::join(measure_names(), ", ")); }

void require_measure(const std::string& name) {
    if (!is_measure_name(name)) {
        throw RequestError(400, "unknown_measure",
                           fmt::format("unknown measure '{}'; valid names: {}", name, valid_measures_text()));
    }
}

std::optional<Date> date_param(const std::optional<std::string>& text, const char* what) {
    if (!text || text->empty()) return std::nullopt;
    try {
        return parse_date(*text);
    } catch (const ParseError& e) {
        throw RequestError(400, "bad_date", fmt::format("{}: {}", what, e.what()));
    }
}

std::optional<std::string> lookup(const QueryParams& q, const std::string& key) {
    auto it = q.find(key);
    if (it == q.end()) return std::nullopt;
    return it->second;
}

DateWindow resolve_window(std::optional<Date> from, std::optional<Date> to, const ApiOptions& opt) {
    DateWindow w{};
    if (!from || !to) w = default_window(opt.today());
    if (from) w.from = *from;
    if (to) w.to = *to;
    if (w.from > w.to) {
        throw RequestError(400, "bad_range", fmt::format("from ({}) is after to ({})", format_date(w.from),
                                                         format_date(w.to)));
    }
    return w;
}

const std::vector<DailyMeasures>& require_series(const MeasureSnapshot& snap, const std::string& symbol,
                                                 AssetClass* cls) {
    const auto* rows = snap.series(symbol, cls);
    if (rows == nullptr) throw RequestError(404, "unknown_symbol", fmt::format("unknown symbol '{}'", symbol));
    return *rows;
}

json annualized_or_null(double v) { return std::isfinite(v) && v >= 0.0 ? json(annualize(v)) : json(nullptr); }

json asset_entries(const MeasureSnapshot& snap, AssetClass c) {
    json list = json::array();
    const auto it = snap.rows.find(c);
    if (it == snap.rows.end()) return list;
    for (const auto& [symbol, rows] : it->second) {
        if (rows.empty()) continue;
        const auto ref = find_reference_asset(symbol);
        json e = {{"symbol", symbol},
                  {"name", ref ? ref->name : ""},
                  {"sector", ref ? ref->sector : ""},
                  {"first_date", format_date(ref ? ref->first_date : rows.front().date)},
                  {"stored_from", format_date(rows.front().date)},
                  {"stored_to", format_date(rows.back().date)},
                  {"observations", rows.size()}};
        if (c == AssetClass::future) e["exchange"] = ref ? ref->exchange : "";
        if (c == AssetClass::stock) e["dow30"] = ref && ref->dow30;
        list.push_back(std::move(e));
    }
    return list;
}

json get_assets(const MeasureSnapshot& snap, std::optional<AssetClass> only) {
    json out = json::object();
    for (auto c : kClasses) {
        if (!only || *only == c) out[std::string(asset_class_id(c))] = asset_entries(snap, c);
    }
    return out;
}

json get_measures(const MeasureSnapshot& snap, const std::string& symbol, const QueryParams& q,
                  const ApiOptions& opt) {
    AssetClass cls{};
    const auto& all = require_series(snap, symbol, &cls);
    std::vector<std::string> names = split_list(lookup(q, "names").value_or(""));
    if (names.empty()) names.emplace_back("rv5");
    for (const auto& n : names) require_measure(n);
    const auto w = resolve_window(date_param(lookup(q, "from"), "from"), date_param(lookup(q, "to"), "to"), opt);
    json rows = json::array();
    for (const auto& r : rows_in(all, w.from, w.to)) {
        json values = json::object();
        json ann = json::object();
        for (const auto& n : names) {
            const double v = *r.get(n);
            values[n] = number_or_null(v);
            ann[n] = annualized_or_null(v);
        }
        rows.push_back({{"date", format_date(r.date)}, {"values", values}, {"annualized", ann}});
    }
    return {{"symbol", symbol},
            {"asset_class", std::string(asset_class_id(cls))},
            {"from", format_date(w.from)},
            {"to", format_date(w.to)},
            {"measures", names},
            {"rows", rows}};
}

json get_summary(const MeasureSnapshot& snap, const std::string& symbol, const QueryParams& q,
                 const ApiOptions& opt) {
    AssetClass cls{};
    const auto& all = require_series(snap, symbol, &cls);
    const std::string measure = lookup(q, "measure").value_or("rv5");
    require_measure(measure);
    const auto w = resolve_window(date_param(lookup(q, "from"), "from"), date_param(lookup(q, "to"), "to"), opt);
    const auto window = rows_in(all, w.from, w.to);
    json out = stats_to_json(summary_stats(window, measure, cls == AssetClass::stock));
    out["symbol"] = symbol;
    out["measure"] = measure;
    out["from"] = format_date(w.from);
    out["to"] = format_date(w.to);
    out["observations"] = window.size();
    return out;
}

std::optional<std::string> body_string(const json& body, const char* key) {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    if (!body[key].is_string()) throw RequestError(400, "bad_request", fmt::format("'{}' must be a string", key));
    return body[key].get<std::string>();
}

json plot_json(std::span<const DailyMeasures> window, std::span<const DailyMeasures> later, const ModelData& data,
               const EstimationResult& est) {
    const ModelFamily f = est.fit.spec.family;
    json dates = json::array(), actual = json::array(), fitted = json::array();
    for (std::size_t i = 0; i < est.fit.fitted.size(); ++i) {
        const std::size_t k = est.fit.fitted_offset + i;
        dates.push_back(format_date(window[k].date));
        actual.push_back(to_plot_scale(f, data.y[k]));
        fitted.push_back(to_plot_scale(f, est.fit.fitted[i]));
    }
    json out = {{"scale", "annualized_vol"},
                {"in_sample", {{"dates", dates}, {"actual", actual}, {"fitted", fitted}}},
                {"forecast", nullptr}};
    if (est.forecast) {
        const auto& fc = *est.forecast;
        json fd = json::array(), point = json::array(), lo = json::array(), hi = json::array(), act = json::array();
        for (std::size_t h = 0; h < fc.horizon; ++h) {
            fd.push_back(format_date(later[h].date));
            point.push_back(to_plot_scale(f, fc.point[h]));
            lo.push_back(to_plot_scale(f, fc.ci_low[h]));
            hi.push_back(to_plot_scale(f, fc.ci_high[h]));
            act.push_back(to_plot_scale(f, fc.actuals[h]));
        }
        out["forecast"] = {{"dates", fd}, {"point", point}, {"ci_low", lo}, {"ci_high", hi}, {"actual", act}};
    }
    return out;
}

HttpResponse post_estimate(std::shared_ptr<const MeasureSnapshot> snap, std::string_view body_text,
                           const ApiOptions& opt) {
    json body;
    try {
        body = json::parse(body_text);
    } catch (const json::parse_error& e) {
        throw RequestError(400, "bad_request", std::string("request body is not valid JSON: ") + e.what());
    }
    if (!body.is_object()) throw RequestError(400, "bad_request", "request body must be a JSON object");
    const auto symbol = body_string(body, "symbol");
    if (!symbol) throw RequestError(400, "bad_request", "'symbol' is required");
    const std::string measure = body_string(body, "measure").value_or("rv5");
    require_measure(measure);
    const std::string family_text = body_string(body, "family").value_or("har");
    const auto family = parse_model_family(family_text);
    if (!family) {
        throw RequestError(400, "unknown_family",
                           fmt::format("unknown model family '{}'; valid: har, harq, mem11, amem11, amem21",
                                       family_text));
    }
    const auto w = resolve_window(date_param(body_string(body, "from"), "from"),
                                  date_param(body_string(body, "to"), "to"), opt);
    const ModelSpec spec{*family, measure};

    AssetClass cls{};
    const auto& all = require_series(*snap, *symbol, &cls);
    const auto window = rows_in(all, w.from, w.to);
    if (window.size() < kMinEstimationObs) {
        throw RequestError(422, "insufficient_data",
                           fmt::format("estimation needs at least {} observations; the window {} to {} has {}",
                                       kMinEstimationObs, format_date(w.from), format_date(w.to), window.size()));
    }

    // The fit runs on its own thread so a slow optimisation cannot hold the request past the timeout.
    auto promise = std::make_shared<std::promise<EstimationResult>>();
    auto future = promise->get_future();
    const std::span<const DailyMeasures> all_rows(all);
    std::thread([snap, all_rows, spec, w, promise] {
        try {
            promise->set_value(estimate(all_rows, spec, w.from, w.to));
        } catch (...) {
            promise->set_exception(std::current_exception());
        }
    }).detach();
    if (future.wait_for(opt.estimate_timeout) != std::future_status::ready) {
        return error_response(504, "timeout",
                              fmt::format("estimation did not finish within {} ms", opt.estimate_timeout.count()));
    }
    EstimationResult est;
    try {
        est = future.get();
    } catch (const InsufficientDataError& e) {
        throw RequestError(422, "insufficient_data", e.what());
    } catch (const NumericalError& e) {
        throw RequestError(422, "estimation_failed", e.what());
    } catch (const std::invalid_argument& e) {
        throw RequestError(422, "invalid_series", e.what());
    } catch (const std::domain_error& e) {
        throw RequestError(422, "invalid_series", e.what());
    }

    const auto later = std::span<const DailyMeasures>(window.data() + window.size(), est.later_rows);
    const ModelData data = model_data_from_rows(window, spec);
    json out = {{"symbol", *symbol},
                {"asset_class", std::string(asset_class_id(cls))},
                {"window", {{"from", format_date(w.from)}, {"to", format_date(w.to)}, {"observations", window.size()}}},
                {"fit", fit_to_json(est.fit)},
                {"forecast", est.forecast ? forecast_to_json(*est.forecast) : json(nullptr)},
                {"plot", plot_json(window, later, data, est)},
                {"notice", nullptr}};
    if (!est.forecast) {
        out["notice"] = fmt::format("forecast omitted: {} observations after the window, at least {} needed",
                                    est.later_rows, kMinHorizon);
    }
    return json_response(out);
}

HttpResponse get_download(const MeasureSnapshot& snap, std::string_view class_text, std::string_view kind_text) {
    const auto cls = parse_asset_class(class_text);
    if (!cls) throw RequestError(404, "unknown_asset_class", fmt::format("unknown asset class '{}'", class_text));
    const auto kind = parse_archive_kind(kind_text);
    if (!kind) {
        throw RequestError(404, "unknown_kind",
                           fmt::format("unknown download kind '{}'; use variance or covariance", kind_text));
    }
    auto bytes = build_archive(snap, *cls, *kind);
    if (!bytes) {
        throw RequestError(404, "empty", fmt::format("no {} data stored for {}", kind_text, asset_class_id(*cls)));
    }
    HttpResponse r;
    r.content_type = "application/x-tar";
    r.body = std::move(*bytes);
    r.headers["Content-Disposition"] =
        fmt::format("attachment; filename=\"{}_{}.tar\"", asset_class_id(*cls), kind_text);
    return r;
}

json get_defaults(const ApiOptions& opt) {
    const auto w = default_window(opt.today());
    std::vector<std::string> families;
    for (auto f : {ModelFamily::har, ModelFamily::harq, ModelFamily::mem11, ModelFamily::amem11, ModelFamily::amem21}) {
        families.emplace_back(to_string(f));
    }
    return {{"window", {{"from", format_date(w.from)}, {"to", format_date(w.to)}}},
            {"measures", std::vector<std::string>(measure_names().begin(), measure_names().end())},
            {"covariance_measures", std::vector<std::string>(covariance_names().begin(), covariance_names().end())},
            {"families", families},
            {"min_estimation_obs", kMinEstimationObs},
            {"min_horizon", kMinHorizon},
            {"max_horizon", kMaxHorizon}};
}

}  // namespace

HttpResponse error_response(int status, std::string_view code, std::string_view message) {
    return json_response({{"error", {{"code", code}, {"message", message}}}}, status);
}

Api::Api(std::shared_ptr<MeasureStore> store, ApiOptions options)
    : store_(std::move(store)), options_(std::move(options)) {
    if (!store_) throw std::invalid_argument("Api: store is null");
}

HttpResponse Api::handle(std::string_view method, std::string_view path, const QueryParams& query,
                         std::string_view body) const {
    const auto seg = split_path(path);
    const auto snap = store_->snapshot();
    auto method_not_allowed = [&] {
        return error_response(405, "method_not_allowed", fmt::format("{} not allowed on {}", method, path));
    };
    try {
        if (seg.empty()) return error_response(404, "not_found", "no route for /");
        const std::string_view head = seg[0];
        const bool get = method == "GET";
        if (head == "health" && seg.size() == 1) return get ? json_response({{"status", "ok"}}) : method_not_allowed();
        if (head == "defaults" && seg.size() == 1) return get ? json_response(get_defaults(options_)) : method_not_allowed();
        if (head == "assets" && seg.size() <= 2) {
            if (!get) return method_not_allowed();
            if (seg.size() == 1) return json_response(get_assets(*snap, std::nullopt));
            const auto cls = parse_asset_class(seg[1]);
            if (!cls) return error_response(404, "unknown_asset_class", fmt::format("unknown asset class '{}'", seg[1]));
            return json_response(get_assets(*snap, cls));
        }
        if (head == "measures" && seg.size() == 2) {
            return get ? json_response(get_measures(*snap, std::string(seg[1]), query, options_)) : method_not_allowed();
        }
        if (head == "summary" && seg.size() == 2) {
            return get ? json_response(get_summary(*snap, std::string(seg[1]), query, options_)) : method_not_allowed();
        }
        if (head == "models" && seg.size() == 2 && seg[1] == "estimate") {
            return method == "POST" ? post_estimate(snap, body, options_) : method_not_allowed();
        }
        if (head == "download" && seg.size() == 3) {
            return get ? get_download(*snap, seg[1], seg[2]) : method_not_allowed();
        }
        return error_response(404, "not_found", fmt::format("no route for {}", path));
    } catch (const RequestError& e) {
        return error_response(e.status, e.code, e.what());
    } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", method, path, e.what());
        return error_response(500, "internal", e.what());
    }
}

void serve(const Api& api, const std::string& host, int port) {
    httplib::Server server;
    auto dispatch = [&api](const httplib::Request& req, httplib::Response& res) {
        QueryParams q;
        for (const auto& [k, v] : req.params) q.emplace(k, v);
        const HttpResponse r = api.handle(req.method, req.path, q, req.body);
        res.status = r.status;
        for (const auto& [k, v] : r.headers) res.set_header(k, v);
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(r.body, r.content_type);
    };
    server.Get(".*", dispatch);
    server.Post(".*", dispatch);
    server.Put(".*", dispatch);
    server.Delete(".*", dispatch);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    spdlog::info("listening on {}:{}", host, port);
    if (!server.listen(host, port)) throw std::runtime_error(fmt::format("cannot listen on {}:{}", host, port));
}

}  // namespace rvkit
