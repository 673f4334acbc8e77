#include "rvkit/ingest/day_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rvkit/common/errors.hpp"

namespace rvkit {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kFormatVersion = "1";

double flag_value(TickFlag f) {
    switch (f) {
        case TickFlag::valid: return 1.0;
        case TickFlag::outlier: return kNaN;
        case TickFlag::off_hours: return 0.0;
    }
    return 1.0;
}

TickFlag flag_from(double v) {
    if (std::isnan(v)) return TickFlag::outlier;
    if (v == 1.0) return TickFlag::valid;
    if (v == 0.0) return TickFlag::off_hours;
    throw IntegrityError("invalid Flag value in day file");
}

}  // namespace

fs::path symbol_dir(const fs::path& root, AssetClass c, const std::string& symbol) {
    return root / std::string(asset_class_dir(c)) / symbol;
}

fs::path day_path(const fs::path& root, AssetClass c, const std::string& symbol, Date date) {
    return symbol_dir(root, c, symbol) / (format_date_file(date) + ".parquet");
}

io::Table to_table(const TickSeries& s) {
    const auto n = s.records.size();
    std::vector<std::int32_t> time(n);
    std::vector<double> price(n), bid(n), ask(n), flag(n), clean(n);
    std::vector<std::int64_t> volume(n), trades(n);
    std::vector<std::int32_t> odd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = s.records[i];
        time[i] = static_cast<std::int32_t>(r.time.count());
        price[i] = r.price;
        bid[i] = r.bid.value_or(kNaN);
        ask[i] = r.ask.value_or(kNaN);
        volume[i] = r.volume.value_or(-1);
        trades[i] = r.trades.value_or(-1);
        flag[i] = flag_value(r.flag);
        odd[i] = r.odd_lot ? 1 : 0;
        clean[i] = r.replacement.value_or(kNaN);
    }
    io::Table t;
    t.columns.push_back({"Time", std::move(time), io::Annotation::time_millis});
    t.columns.push_back({"Price", std::move(price)});
    t.columns.push_back({"Bid", std::move(bid)});
    t.columns.push_back({"Ask", std::move(ask)});
    t.columns.push_back({"Volume", std::move(volume)});
    t.columns.push_back({"Trades", std::move(trades)});
    t.columns.push_back({"Flag", std::move(flag)});
    t.columns.push_back({"OddLot", std::move(odd)});
    t.columns.push_back({"Clean", std::move(clean)});
    t.metadata = {{"symbol", s.symbol},
                  {"date", format_date(s.date)},
                  {"asset_class", std::string(asset_class_id(s.asset_class))},
                  {"format_version", kFormatVersion}};
    return t;
}

TickSeries from_table(const io::Table& t) {
    TickSeries s;
    const auto* sym = t.meta("symbol");
    const auto* date = t.meta("date");
    const auto* cls = t.meta("asset_class");
    if (!sym || !date || !cls) throw IntegrityError("day file lacks symbol/date/asset_class metadata");
    s.symbol = *sym;
    try {
        s.date = parse_date(*date);
    } catch (const ParseError&) {
        throw IntegrityError("day file has an invalid date");
    }
    const auto c = parse_asset_class(*cls);
    if (!c) throw IntegrityError("day file has an unknown asset class");
    s.asset_class = *c;

    const auto& time = t.get<std::int32_t>("Time");
    const auto& price = t.get<double>("Price");
    const auto& bid = t.get<double>("Bid");
    const auto& ask = t.get<double>("Ask");
    const auto& volume = t.get<std::int64_t>("Volume");
    const auto& trades = t.get<std::int64_t>("Trades");
    const auto& flag = t.get<double>("Flag");
    const auto& odd = t.get<std::int32_t>("OddLot");
    const auto& clean = t.get<double>("Clean");
    s.records.resize(t.num_rows());
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        auto& r = s.records[i];
        r.time = Millis{time[i]};
        r.price = price[i];
        if (!std::isnan(bid[i])) r.bid = bid[i];
        if (!std::isnan(ask[i])) r.ask = ask[i];
        if (volume[i] >= 0) r.volume = volume[i];
        if (trades[i] >= 0) r.trades = trades[i];
        r.flag = flag_from(flag[i]);
        r.odd_lot = odd[i] != 0;
        if (!std::isnan(clean[i])) r.replacement = clean[i];
        if (i > 0 && r.time <= s.records[i - 1].time) {
            throw IntegrityError("day file timestamps are not strictly increasing");
        }
    }
    return s;
}

fs::path store_day(const TickSeries& series, const fs::path& root) {
    if (series.symbol.empty()) throw std::invalid_argument("cannot store a series without a symbol");
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        if (series.records[i].time <= series.records[i - 1].time) {
            throw std::invalid_argument("store_day expects an aggregated series with unique timestamps");
        }
    }
    const auto path = day_path(root, series.asset_class, series.symbol, series.date);
    io::write_parquet(to_table(series), path);
    return path;
}

std::optional<TickSeries> load_day(const fs::path& root, AssetClass c, const std::string& symbol, Date date) {
    const auto path = day_path(root, c, symbol, date);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return std::nullopt;
    auto series = from_table(io::read_parquet(path));
    if (series.symbol != symbol || series.date != date || series.asset_class != c) {
        throw IntegrityError(path.string() + ": metadata does not match its location");
    }
    return series;
}

std::vector<Date> list_days(const fs::path& root, AssetClass c, const std::string& symbol) {
    std::vector<Date> out;
    const auto dir = symbol_dir(root, c, symbol);
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".parquet") continue;
        const auto stem = entry.path().stem().string();
        try {
            out.push_back(parse_date(stem));
        } catch (const ParseError&) {
            // not a day file
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> list_symbols(const fs::path& root, AssetClass c) {
    std::vector<std::string> out;
    const auto dir = root / std::string(asset_class_dir(c));
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) out.push_back(entry.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void preserve_adjustments(const fs::path& source, const fs::path& root, AssetClass c, const std::string& symbol) {
    const auto dir = symbol_dir(root, c, symbol);
    fs::create_directories(dir);
    fs::copy_file(source, dir / "adjustments.txt", fs::copy_options::overwrite_existing);
}

}  // namespace rvkit
