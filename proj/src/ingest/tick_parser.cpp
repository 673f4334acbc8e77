#include "rvkit/ingest/tick_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <string_view>

#include "rvkit/common/errors.hpp"

namespace rvkit {

namespace {

enum Col { kDate, kTime, kPrice, kBid, kAsk, kVolume, kTrades, kNumCols };

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
        while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
        out.push_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(std::string_view s, const char* what, std::size_t line) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(std::string("non-numeric ") + what + " '" + std::string(s) + "'", line);
    }
    return v;
}

std::int64_t to_int(std::string_view s, const char* what, std::size_t line) {
    // Volumes occasionally arrive as "150.0".
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc{} && ptr == end && !s.empty()) return v;
    const double d = to_double(s, what, line);
    if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
        throw ParseError(std::string("non-integer ") + what + " '" + std::string(s) + "'", line);
    }
    return static_cast<std::int64_t>(d);
}

bool looks_like_header(std::string_view line) {
    for (char c : line) {
        if (std::isalpha(static_cast<unsigned char>(c))) return true;
        if (std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return false;
}

}  // namespace

void apply_session_flags(TickSeries& series, const std::optional<TradingSession>& session) {
    for (auto& r : series.records) {
        const bool inside = session && session->contains(r.time);
        if (!inside) {
            r.flag = TickFlag::off_hours;
        } else if (r.flag == TickFlag::off_hours) {
            r.flag = TickFlag::valid;
        }
    }
}

std::vector<TickSeries> parse_tick_stream(std::istream& in, AssetClass asset_class, const std::string& symbol,
                                          const HolidayCalendar& calendar) {
    std::array<int, kNumCols> idx{0, 1, 2, 3, 4, 5, -1};
    std::map<Date, TickSeries> days;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    const bool quote_class = asset_class != AssetClass::stock;
    std::vector<std::string_view> cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (first) {
            first = false;
            if (looks_like_header(line)) {
                idx.fill(-1);
                const auto names = split(line);
                for (std::size_t i = 0; i < names.size(); ++i) {
                    const auto n = lower(names[i]);
                    const int c = static_cast<int>(i);
                    if (n == "date") idx[kDate] = c;
                    else if (n == "time" || n == "timestamp") idx[kTime] = c;
                    else if (n == "price" || n == "last") idx[kPrice] = c;
                    else if (n == "bid") idx[kBid] = c;
                    else if (n == "ask") idx[kAsk] = c;
                    else if (n == "volume" || n == "size") idx[kVolume] = c;
                    else if (n == "trades") idx[kTrades] = c;
                }
                if (idx[kDate] < 0 || idx[kTime] < 0 || idx[kPrice] < 0) {
                    throw ParseError("header must name Date, Time and Price columns", line_no);
                }
                if (quote_class && (idx[kBid] < 0 || idx[kAsk] < 0)) {
                    throw ParseError("exchange-rate and futures files need Bid and Ask columns", line_no);
                }
                continue;
            }
        }
        cells = split(line);
        auto cell = [&](Col c) -> std::string_view {
            const int i = idx[c];
            if (i < 0 || static_cast<std::size_t>(i) >= cells.size()) return {};
            return cells[static_cast<std::size_t>(i)];
        };
        if (cells.size() < 3) throw ParseError("expected at least Date,Time,Price", line_no);

        Date date{};
        Millis time{};
        try {
            date = parse_date(cell(kDate));
            time = parse_time_of_day(cell(kTime));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        TickRecord r;
        r.time = quote_class ? std::chrono::floor<std::chrono::seconds>(time) : time;
        r.price = to_double(cell(kPrice), "price", line_no);
        if (!(r.price > 0)) throw ParseError("price must be positive", line_no);
        if (auto b = cell(kBid); !b.empty()) {
            r.bid = to_double(b, "bid", line_no);
            if (!(*r.bid > 0)) throw ParseError("bid must be positive", line_no);
        }
        if (auto a = cell(kAsk); !a.empty()) {
            r.ask = to_double(a, "ask", line_no);
            if (!(*r.ask > 0)) throw ParseError("ask must be positive", line_no);
        }
        if (quote_class && (!r.bid || !r.ask)) throw ParseError("missing bid/ask quote", line_no);
        if (auto v = cell(kVolume); !v.empty()) {
            r.volume = to_int(v, "volume", line_no);
            if (*r.volume < 0) throw ParseError("volume must be non-negative", line_no);
        }
        if (auto t = cell(kTrades); !t.empty()) {
            r.trades = to_int(t, "trades", line_no);
            if (*r.trades <= 0) throw ParseError("trades must be positive", line_no);
        }
        auto& day = days[date];
        if (day.records.empty()) {
            day.symbol = symbol;
            day.date = date;
            day.asset_class = asset_class;
        }
        day.records.push_back(r);
    }

    std::vector<TickSeries> out;
    out.reserve(days.size());
    for (auto& [date, day] : days) {
        std::stable_sort(day.records.begin(), day.records.end(),
                         [](const TickRecord& a, const TickRecord& b) { return a.time < b.time; });
        apply_session_flags(day, session_for(asset_class, date, calendar));
        out.push_back(std::move(day));
    }
    return out;
}

namespace {

std::string symbol_from_path(const std::filesystem::path& path) {
    std::string stem = path.filename().string();
    const auto cut = stem.find_first_of("_.");
    return cut == std::string::npos ? stem : stem.substr(0, cut);
}

}  // namespace

std::vector<TickSeries> parse_tick_file_days(const std::filesystem::path& path, AssetClass asset_class,
                                             const HolidayCalendar& calendar, std::string symbol) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tick file " + path.string());
    if (symbol.empty()) symbol = symbol_from_path(path);
    return parse_tick_stream(in, asset_class, symbol, calendar);
}

TickSeries parse_tick_file(const std::filesystem::path& path, AssetClass asset_class, const HolidayCalendar& calendar,
                           std::string symbol) {
    if (symbol.empty()) symbol = symbol_from_path(path);
    auto days = parse_tick_file_days(path, asset_class, calendar, symbol);
    if (days.empty()) {
        TickSeries empty;
        empty.symbol = symbol;
        empty.asset_class = asset_class;
        return empty;
    }
    if (days.size() > 1) {
        throw ParseError("file " + path.string() + " spans " + std::to_string(days.size()) +
                         " dates; use parse_tick_file_days");
    }
    return std::move(days.front());
}

}  // namespace rvkit
