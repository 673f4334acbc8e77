#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>

#include "rvkit/common/errors.hpp"
#include "rvkit/io/parquet.hpp"
#include "rvkit/models/forecast.hpp"
#include "rvkit/models/har.hpp"
#include "rvkit/service/api.hpp"
#include "rvkit/service/config.hpp"
#include "rvkit/service/pipeline.hpp"
#include "rvkit/service/queries.hpp"
#include "rvkit/service/report.hpp"
#include "rvkit/synth/generator.hpp"

namespace py = pybind11;
using namespace rvkit;

namespace {

AssetClass class_of(const std::string& s) {
    auto c = parse_asset_class(s);
    if (!c) throw py::value_error("unknown asset class '" + s + "'");
    return *c;
}

ModelFamily family_of(const std::string& s) {
    auto f = parse_model_family(s);
    if (!f) throw py::value_error("unknown model family '" + s + "'");
    return *f;
}

std::optional<Date> opt_date(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    return parse_date(*s);
}

py::object value_or_none(double v) { return std::isnan(v) ? py::none() : py::cast(v); }

py::dict table_to_dict(const io::Table& t) {
    py::dict out;
    for (const auto& c : t.columns) {
        std::visit([&](const auto& v) { out[py::str(c.name)] = py::cast(v); }, c.data);
    }
    return out;
}

io::Table dict_to_table(const py::dict& d) {
    io::Table t;
    for (auto [key, value] : d) {
        const std::string name = py::cast<std::string>(key);
        const py::list items = py::list(py::reinterpret_borrow<py::object>(value));
        if (items.empty()) throw py::value_error("column '" + name + "' is empty");
        const py::handle first = items[0];
        if (py::isinstance<py::str>(first)) {
            t.columns.push_back({name, py::cast<std::vector<std::string>>(items), io::Annotation::utf8});
        } else if (py::isinstance<py::bool_>(first) || py::isinstance<py::int_>(first)) {
            t.columns.push_back({name, py::cast<std::vector<std::int64_t>>(items)});
        } else {
            t.columns.push_back({name, py::cast<std::vector<double>>(items)});
        }
    }
    return t;
}

py::dict rows_to_columns(const std::vector<DailyMeasures>& rows) {
    py::list symbol, date, open, high, low, close, volume, trades, bandwidth;
    std::vector<py::list> values(measure_names().size());
    for (const auto& r : rows) {
        symbol.append(r.symbol);
        date.append(format_date(r.date));
        open.append(r.open);
        high.append(r.high);
        low.append(r.low);
        close.append(r.close);
        volume.append(r.volume ? py::cast(*r.volume) : py::none());
        trades.append(r.trades ? py::cast(*r.trades) : py::none());
        bandwidth.append(r.rk_bandwidth);
        for (std::size_t i = 0; i < values.size(); ++i) values[i].append(value_or_none(*r.get(measure_names()[i])));
    }
    py::dict out;
    out["symbol"] = symbol;
    out["date"] = date;
    out["open"] = open;
    out["high"] = high;
    out["low"] = low;
    out["close"] = close;
    out["volume"] = volume;
    out["trades"] = trades;
    for (std::size_t i = 0; i < values.size(); ++i) out[py::str(std::string(measure_names()[i]))] = values[i];
    out["rk_bandwidth"] = bandwidth;
    return out;
}

ModelData model_data(std::vector<double> y, std::vector<double> rq, std::vector<bool> negative) {
    ModelData d;
    d.y = std::move(y);
    d.rq = std::move(rq);
    d.negative = std::move(negative);
    return d;
}

struct PyApi {
    std::shared_ptr<MeasureStore> store;
    std::unique_ptr<Api> api;
};

}  // namespace

PYBIND11_MODULE(_rvkit, m) {
    m.doc() = "Realized measures, volatility models and the HTTP handler of rvkit";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<IntegrityError>(m, "IntegrityError", PyExc_IOError);
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.attr("PARZEN_C_STAR") = kParzenCStar;
    m.attr("MIN_ESTIMATION_OBS") = kMinEstimationObs;
    m.attr("MAX_HORIZON") = kMaxHorizon;

    m.def("measure_names", [] { return std::vector<std::string>(measure_names().begin(), measure_names().end()); });
    m.def("covariance_names",
          [] { return std::vector<std::string>(covariance_names().begin(), covariance_names().end()); });
    m.def("annualize", &annualize, py::arg("variance"));
    m.def("newey_west_lags", &newey_west_lags, py::arg("t"));
    m.def("realized_variance", [](const std::vector<double>& r) { return realized_variance(r); });
    m.def("bipower_variation", [](const std::vector<double>& r) { return bipower_variation(r); });
    m.def("realized_quarticity", [](const std::vector<double>& r) { return realized_quarticity(r); });
    m.def("return_measures", [](const std::vector<double>& r) -> py::object {
        const auto rm = return_based_measures(r);
        if (!rm) return py::none();
        py::dict d;
        d["rv"] = rm->rv;
        d["rq"] = rm->rq;
        d["bv"] = rm->bv;
        d["rsp"] = rm->rsp;
        d["rsn"] = rm->rsn;
        d["medrv"] = rm->medrv ? py::cast(*rm->medrv) : py::none();
        d["minrv"] = rm->minrv ? py::cast(*rm->minrv) : py::none();
        return d;
    });

    m.def("read_parquet", [](const std::filesystem::path& p) { return table_to_dict(io::read_parquet(p)); });
    m.def("write_parquet", [](const py::dict& d, const std::filesystem::path& p) { io::write_parquet(dict_to_table(d), p); });

    py::class_<PipelineConfig>(m, "Config")
        .def(py::init([] { return default_config(); }))
        .def_static("load", &load_config, py::arg("path"))
        .def_property(
            "raw_root", [](const PipelineConfig& c) { return c.raw_root; },
            [](PipelineConfig& c, const std::filesystem::path& p) { c.raw_root = p; })
        .def_property(
            "measure_root", [](const PipelineConfig& c) { return c.measure_root; },
            [](PipelineConfig& c, const std::filesystem::path& p) { c.measure_root = p; })
        .def_property(
            "k", [](const PipelineConfig& c) { return c.cleaning.k; },
            [](PipelineConfig& c, int v) { c.cleaning.k = v; })
        .def_property(
            "delta", [](const PipelineConfig& c) { return c.cleaning.delta; },
            [](PipelineConfig& c, double v) { c.cleaning.delta = v; })
        .def_property(
            "gamma", [](const PipelineConfig& c) { return c.cleaning.gamma; },
            [](PipelineConfig& c, double v) { c.cleaning.gamma = v; });

    m.def(
        "write_corpus",
        [](const std::filesystem::path& dir, const std::string& cls, const std::vector<std::string>& symbols,
           const std::string& from, const std::string& to, std::uint64_t seed, double daily_variance,
           double mean_gap_s, double noise_sd, double spike_share, const PipelineConfig& cfg) {
            CorpusSpec spec;
            spec.asset_class = class_of(cls);
            spec.symbols = symbols;
            spec.from = parse_date(from);
            spec.to = parse_date(to);
            spec.seed = seed;
            spec.ticks.daily_variance = daily_variance;
            spec.ticks.mean_gap_s = mean_gap_s;
            spec.ticks.noise_sd = noise_sd;
            spec.ticks.spike_share = spike_share;
            return write_corpus(dir, spec, cfg.calendar);
        },
        py::arg("dir"), py::arg("asset_class"), py::arg("symbols"), py::arg("date_from"), py::arg("date_to"),
        py::arg("seed") = 1, py::arg("daily_variance") = 1e-4, py::arg("mean_gap_s") = 2.0, py::arg("noise_sd") = 0.0,
        py::arg("spike_share") = 0.0, py::arg("config") = default_config());

    m.def(
        "ingest_files",
        [](const std::vector<std::filesystem::path>& files, const std::string& cls, const PipelineConfig& cfg) {
            const auto r = ingest_files(files, class_of(cls), cfg);
            return py::dict(py::arg("files") = r.files, py::arg("days") = r.days, py::arg("records") = r.records,
                            py::arg("skipped_days") = r.skipped_days);
        },
        py::arg("files"), py::arg("asset_class"), py::arg("config"));
    m.def(
        "clean_symbol",
        [](const std::string& cls, const std::string& symbol, const PipelineConfig& cfg,
           const std::optional<std::string>& from, const std::optional<std::string>& to) {
            const auto r = clean_symbol(class_of(cls), symbol, cfg, opt_date(from), opt_date(to));
            return py::dict(py::arg("days") = r.days, py::arg("observations") = r.observations,
                            py::arg("outliers") = r.outliers);
        },
        py::arg("asset_class"), py::arg("symbol"), py::arg("config"), py::arg("date_from") = py::none(),
        py::arg("date_to") = py::none());
    m.def(
        "compute_measures",
        [](const std::string& cls, const std::string& symbol, const PipelineConfig& cfg,
           const std::optional<std::string>& from, const std::optional<std::string>& to) {
            return rows_to_columns(compute_measures(class_of(cls), symbol, cfg, opt_date(from), opt_date(to)));
        },
        py::arg("asset_class"), py::arg("symbol"), py::arg("config"), py::arg("date_from") = py::none(),
        py::arg("date_to") = py::none());

    m.def(
        "fit_json",
        [](std::vector<double> y, const std::string& family, const std::string& measure, std::vector<double> rq,
           std::vector<bool> negative) {
            const ModelSpec spec{family_of(family), measure};
            const ModelData d = model_data(std::move(y), std::move(rq), std::move(negative));
            py::gil_scoped_release release;
            return fit_to_json(fit_model(d, spec)).dump();
        },
        py::arg("y"), py::arg("family"), py::arg("measure") = "rv5", py::arg("rq") = std::vector<double>{},
        py::arg("negative") = std::vector<bool>{});
    m.def(
        "forecast_json",
        [](std::vector<double> y, std::size_t n_est, const std::string& family, const std::string& measure,
           std::vector<double> rq, std::vector<bool> negative, std::size_t max_h) {
            const ModelSpec spec{family_of(family), measure};
            const ModelData full = model_data(std::move(y), std::move(rq), std::move(negative));
            if (n_est > full.y.size()) throw py::value_error("n_est exceeds the series length");
            ModelData est = full;
            est.y.resize(n_est);
            if (!est.rq.empty()) est.rq.resize(n_est);
            if (!est.negative.empty()) est.negative.resize(n_est);
            py::gil_scoped_release release;
            const ModelFit fit = fit_model(est, spec);
            nlohmann::json out = {{"fit", fit_to_json(fit)}, {"forecast", forecast_to_json(forecast(fit, full, max_h))}};
            return out.dump();
        },
        py::arg("y"), py::arg("n_est"), py::arg("family"), py::arg("measure") = "rv5",
        py::arg("rq") = std::vector<double>{}, py::arg("negative") = std::vector<bool>{},
        py::arg("max_h") = kMaxHorizon);

    m.def(
        "simulate_mem",
        [](const std::string& family, const std::vector<double>& theta, std::size_t n, double shape,
           std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            const auto p = simulate_mem(rng, family_of(family),
                                        Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size())),
                                        n, shape);
            return py::make_tuple(p.y, p.negative);
        },
        py::arg("family"), py::arg("theta"), py::arg("n"), py::arg("gamma_shape") = 10.0, py::arg("seed") = 1);
    m.def(
        "simulate_har",
        [](const std::vector<double>& beta, std::size_t n, double sd, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return simulate_har(rng, Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size())),
                                n, sd);
        },
        py::arg("beta"), py::arg("n"), py::arg("sd"), py::arg("seed") = 1);

    py::class_<PyApi>(m, "Api")
        .def(py::init([](const std::filesystem::path& root, const std::optional<std::string>& today) {
                 auto api = std::make_unique<PyApi>();
                 api->store = std::make_shared<MeasureStore>(root);
                 ApiOptions opt;
                 if (today) {
                     const Date d = parse_date(*today);
                     opt.today = [d] { return d; };
                 }
                 api->api = std::make_unique<Api>(api->store, opt);
                 return api;
             }),
             py::arg("store_root"), py::arg("today") = py::none())
        .def("reload", [](PyApi& a) { a.store->reload(); })
        .def(
            "handle",
            [](const PyApi& a, const std::string& method, const std::string& path, const QueryParams& query,
               const std::string& body) {
                HttpResponse r;
                {
                    py::gil_scoped_release release;
                    r = a.api->handle(method, path, query, body);
                }
                return py::make_tuple(r.status, r.content_type, py::bytes(r.body));
            },
            py::arg("method"), py::arg("path"), py::arg("query") = QueryParams{}, py::arg("body") = "");
}
