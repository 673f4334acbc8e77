#include "rvkit/service/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rvkit/common/errors.hpp"

namespace rvkit {

namespace {

namespace pt = boost::property_tree;

constexpr const char* kDefaultIni = R"ini(
[calendar]
version = us-2023-2026
first_supported = 2009-01-01

[calendar.stocks]
holidays = 2023-01-02, 2023-01-16, 2023-02-20, 2023-04-07, 2023-05-29, 2023-06-19, 2023-07-04, 2023-09-04, 2023-11-23, 2023-12-25, 2024-01-01, 2024-01-15, 2024-02-19, 2024-03-29, 2024-05-27, 2024-06-19, 2024-07-04, 2024-09-02, 2024-11-28, 2024-12-25, 2025-01-01, 2025-01-09, 2025-01-20, 2025-02-17, 2025-04-18, 2025-05-26, 2025-06-19, 2025-07-04, 2025-09-01, 2025-11-27, 2025-12-25, 2026-01-01, 2026-01-19, 2026-02-16, 2026-04-03, 2026-05-25, 2026-06-19, 2026-07-03, 2026-09-07, 2026-11-26, 2026-12-25
early_closes = 2023-07-03, 2023-11-24, 2024-07-03, 2024-11-29, 2024-12-24, 2025-07-03, 2025-11-28, 2025-12-24, 2026-11-27, 2026-12-24

[calendar.exchange_rates]
holidays = 2023-12-25, 2024-01-01, 2024-12-25, 2025-01-01, 2025-12-25, 2026-01-01, 2026-12-25
early_closes =

[calendar.futures]
holidays = 2023-12-25, 2024-01-01, 2024-12-25, 2025-01-01, 2025-12-25, 2026-01-01, 2026-12-25
early_closes =

[cleaning]
k = 60
delta = 0.1
gamma = 0.06

[odd_lots]
threshold = 100

[odd_lot_overrides]

[kernel]
base_interval_s = 1
noise_rv_interval_s = 120
sparse_interval_s = 1200
sparse_offsets = 1200
jitter_width = 2

[eligibility]
min_observations = 40
min_span_minutes = 120

[paths]
raw = data/raw
measures = data/measures
)ini";

std::vector<Date> parse_dates(const std::string& list, const std::string& key) {
    std::vector<Date> out;
    std::vector<std::string> parts;
    boost::split(parts, list, boost::is_any_of(", \t"), boost::token_compress_on);
    for (auto& p : parts) {
        boost::trim(p);
        if (p.empty()) continue;
        try {
            out.push_back(parse_date(p));
        } catch (const std::exception& e) {
            throw ParseError("config " + key + ": " + e.what());
        }
    }
    return out;
}

template <class T>
T get_value(const pt::ptree& section, const std::string& key, T fallback, const std::string& where) {
    const auto v = section.get_optional<std::string>(pt::ptree::path_type(key, '/'));
    if (!v) return fallback;
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            return boost::trim_copy(*v);
        } else {
            std::istringstream is(boost::trim_copy(*v));
            T out{};
            is >> out;
            if (is.fail() || !is.eof()) throw std::invalid_argument("bad number");
            return out;
        }
    } catch (const std::exception&) {
        throw ParseError("config [" + where + "] " + key + ": cannot parse '" + *v + "'");
    }
}

const pt::ptree* section(const pt::ptree& root, const std::string& name) {
    const auto child = root.get_child_optional(pt::ptree::path_type(name, '/'));
    return child ? &*child : nullptr;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree root;
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("config: " + std::string(e.what()), e.line());
    }
    PipelineConfig cfg;
    if (const auto* cal = section(root, "calendar")) {
        cfg.calendar.set_version(get_value<std::string>(*cal, "version", cfg.calendar.version(), "calendar"));
        const auto first = get_value<std::string>(*cal, "first_supported", "", "calendar");
        if (!first.empty()) cfg.calendar.set_first_supported(parse_dates(first, "first_supported").at(0));
    }
    for (auto c : {AssetClass::stock, AssetClass::exchange_rate, AssetClass::future}) {
        const std::string name = "calendar." + std::string(asset_class_id(c));
        if (const auto* s = section(root, name)) {
            for (auto d : parse_dates(get_value<std::string>(*s, "holidays", "", name), name + ".holidays")) {
                cfg.calendar.add_holiday(c, d);
            }
            for (auto d : parse_dates(get_value<std::string>(*s, "early_closes", "", name), name + ".early_closes")) {
                cfg.calendar.add_early_close(c, d);
            }
        }
    }
    if (const auto* s = section(root, "cleaning")) {
        cfg.cleaning.k = get_value(*s, "k", cfg.cleaning.k, "cleaning");
        cfg.cleaning.delta = get_value(*s, "delta", cfg.cleaning.delta, "cleaning");
        cfg.cleaning.gamma = get_value(*s, "gamma", cfg.cleaning.gamma, "cleaning");
        try {
            cfg.cleaning.validate();
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("config [cleaning]: ") + e.what());
        }
    }
    if (const auto* s = section(root, "odd_lots")) {
        cfg.odd_lots.default_rule.threshold =
            get_value<std::int64_t>(*s, "threshold", cfg.odd_lots.default_rule.threshold, "odd_lots");
    }
    if (const auto* s = section(root, "odd_lot_overrides")) {
        for (const auto& [symbol, node] : *s) {
            cfg.odd_lots.by_symbol[symbol] =
                OddLotRule{get_value<std::int64_t>(*s, symbol, 100, "odd_lot_overrides")};
        }
    }
    for (const auto& [symbol, rule] : cfg.odd_lots.by_symbol) {
        if (rule.threshold <= 0) throw ParseError("config [odd_lot_overrides] " + symbol + ": threshold must be positive");
    }
    if (cfg.odd_lots.default_rule.threshold <= 0) throw ParseError("config [odd_lots]: threshold must be positive");
    if (const auto* s = section(root, "kernel")) {
        auto& k = cfg.kernel;
        k.base_interval = Millis{1000 * get_value<std::int64_t>(*s, "base_interval_s", k.base_interval.count() / 1000, "kernel")};
        k.noise_rv_interval =
            Millis{1000 * get_value<std::int64_t>(*s, "noise_rv_interval_s", k.noise_rv_interval.count() / 1000, "kernel")};
        k.sparse_interval =
            Millis{1000 * get_value<std::int64_t>(*s, "sparse_interval_s", k.sparse_interval.count() / 1000, "kernel")};
        k.sparse_offsets = get_value(*s, "sparse_offsets", k.sparse_offsets, "kernel");
        k.c_star = get_value(*s, "c_star", k.c_star, "kernel");
        k.jitter_width = get_value(*s, "jitter_width", k.jitter_width, "kernel");
        if (k.base_interval.count() <= 0 || k.noise_rv_interval.count() <= 0 || k.sparse_interval.count() <= 0 ||
            k.sparse_offsets <= 0 || !(k.c_star > 0.0) || k.jitter_width < 1) {
            throw ParseError("config [kernel]: values must be positive");
        }
    }
    if (const auto* s = section(root, "eligibility")) {
        cfg.eligibility.min_observations =
            get_value<std::size_t>(*s, "min_observations", cfg.eligibility.min_observations, "eligibility");
        cfg.eligibility.min_span =
            Millis{60000 * get_value<std::int64_t>(*s, "min_span_minutes", cfg.eligibility.min_span.count() / 60000,
                                                   "eligibility")};
    }
    if (const auto* s = section(root, "paths")) {
        cfg.raw_root = resolve(base_dir, get_value<std::string>(*s, "raw", cfg.raw_root.string(), "paths"));
        cfg.measure_root = resolve(base_dir, get_value<std::string>(*s, "measures", cfg.measure_root.string(), "paths"));
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open " + path.string());
    return parse_config(in, path.parent_path());
}

PipelineConfig default_config() {
    std::istringstream in(kDefaultIni);
    return parse_config(in);
}

}  // namespace rvkit
