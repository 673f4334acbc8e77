#include "rvkit/service/measure_store.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "rvkit/common/errors.hpp"
#include "rvkit/io/parquet.hpp"

namespace rvkit {

namespace {

constexpr std::array kClasses{AssetClass::stock, AssetClass::exchange_rate, AssetClass::future};
constexpr const char* kCovFile = "covariances.parquet";

void sort_rows(std::vector<DailyMeasures>& rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
}

}  // namespace

const std::vector<DailyMeasures>* MeasureSnapshot::series(const std::string& symbol, AssetClass* found_class) const {
    for (const auto& [cls, by_symbol] : rows) {
        auto it = by_symbol.find(symbol);
        if (it != by_symbol.end()) {
            if (found_class != nullptr) *found_class = cls;
            return &it->second;
        }
    }
    return nullptr;
}

io::Table measures_to_table(const std::vector<DailyMeasures>& rows) {
    std::vector<std::string> symbol, date;
    std::vector<double> open, high, low, close;
    std::vector<std::int64_t> volume, trades;
    std::vector<std::int32_t> bandwidth;
    std::vector<std::vector<double>> values(measure_names().size());
    for (const auto& r : rows) {
        symbol.push_back(r.symbol);
        date.push_back(format_date(r.date));
        open.push_back(r.open);
        high.push_back(r.high);
        low.push_back(r.low);
        close.push_back(r.close);
        volume.push_back(r.volume.value_or(-1));
        trades.push_back(r.trades.value_or(-1));
        bandwidth.push_back(r.rk_bandwidth);
        for (std::size_t i = 0; i < values.size(); ++i) values[i].push_back(*r.get(measure_names()[i]));
    }
    io::Table t;
    t.columns.push_back({"symbol", std::move(symbol), io::Annotation::utf8});
    t.columns.push_back({"date", std::move(date), io::Annotation::utf8});
    t.columns.push_back({"open", std::move(open)});
    t.columns.push_back({"high", std::move(high)});
    t.columns.push_back({"low", std::move(low)});
    t.columns.push_back({"close", std::move(close)});
    t.columns.push_back({"volume", std::move(volume)});
    t.columns.push_back({"trades", std::move(trades)});
    for (std::size_t i = 0; i < values.size(); ++i) {
        t.columns.push_back({std::string(measure_names()[i]), std::move(values[i])});
    }
    t.columns.push_back({"rk_bandwidth", std::move(bandwidth)});
    t.metadata.emplace_back("rvkit.kind", "daily_measures");
    return t;
}

std::vector<DailyMeasures> measures_from_table(const io::Table& t) {
    std::vector<DailyMeasures> rows;
    try {
        const auto& symbol = t.get<std::string>("symbol");
        const auto& date = t.get<std::string>("date");
        const auto& open = t.get<double>("open");
        const auto& high = t.get<double>("high");
        const auto& low = t.get<double>("low");
        const auto& close = t.get<double>("close");
        const auto& volume = t.get<std::int64_t>("volume");
        const auto& trades = t.get<std::int64_t>("trades");
        const auto& bw = t.get<std::int32_t>("rk_bandwidth");
        std::vector<const std::vector<double>*> values;
        for (auto n : measure_names()) values.push_back(&t.get<double>(n));
        for (std::size_t i = 0; i < t.num_rows(); ++i) {
            DailyMeasures r;
            r.symbol = symbol[i];
            r.date = parse_date(date[i]);
            r.open = open[i];
            r.high = high[i];
            r.low = low[i];
            r.close = close[i];
            if (volume[i] >= 0) r.volume = volume[i];
            if (trades[i] >= 0) r.trades = trades[i];
            r.rk_bandwidth = bw[i];
            for (std::size_t k = 0; k < values.size(); ++k) r.set(measure_names()[k], (*values[k])[i]);
            rows.push_back(std::move(r));
        }
    } catch (const IntegrityError&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("measure table: ") + e.what());
    }
    return rows;
}

io::Table covariances_to_table(const std::vector<CovarianceSet>& sets) {
    std::vector<std::string> date, ai, aj, measure;
    std::vector<double> value;
    for (const auto& s : sets) {
        for (auto name : covariance_names()) {
            const auto& m = *s.get(name);
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    date.push_back(format_date(s.date));
                    ai.push_back(s.symbols[static_cast<std::size_t>(i)]);
                    aj.push_back(s.symbols[static_cast<std::size_t>(j)]);
                    measure.emplace_back(name);
                    value.push_back(m(i, j));
                }
            }
        }
    }
    io::Table t;
    t.columns.push_back({"date", std::move(date), io::Annotation::utf8});
    t.columns.push_back({"asset_i", std::move(ai), io::Annotation::utf8});
    t.columns.push_back({"asset_j", std::move(aj), io::Annotation::utf8});
    t.columns.push_back({"measure", std::move(measure), io::Annotation::utf8});
    t.columns.push_back({"value", std::move(value)});
    t.metadata.emplace_back("rvkit.kind", "covariances");
    return t;
}

std::vector<CovarianceSet> covariances_from_table(const io::Table& t) {
    std::vector<CovarianceSet> out;
    try {
        const auto& date = t.get<std::string>("date");
        const auto& ai = t.get<std::string>("asset_i");
        const auto& aj = t.get<std::string>("asset_j");
        const auto& measure = t.get<std::string>("measure");
        const auto& value = t.get<double>("value");
        std::size_t i = 0;
        while (i < t.num_rows()) {
            // Rows of one date are contiguous: six measures, each an n x n block in row-major order.
            const std::string& d = date[i];
            std::size_t end = i;
            while (end < t.num_rows() && date[end] == d) ++end;
            const std::size_t per = (end - i) / covariance_names().size();
            const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(per))));
            if (n * n * covariance_names().size() != end - i) throw IntegrityError("covariance table: ragged block");
            CovarianceSet s;
            s.date = parse_date(d);
            for (std::size_t k = 0; k < n; ++k) s.symbols.push_back(aj[i + k]);
            std::size_t pos = i;
            for (auto name : covariance_names()) {
                Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t c = 0; c < n; ++c, ++pos) {
                        if (measure[pos] != name || ai[pos] != s.symbols[r] || aj[pos] != s.symbols[c]) {
                            throw IntegrityError("covariance table: unexpected row order");
                        }
                        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value[pos];
                    }
                }
                if (name == "rcov") s.rcov = m;
                if (name == "rbpcov") s.rbpcov = m;
                if (name == "rscov_p") s.rscov_p = m;
                if (name == "rscov_n") s.rscov_n = m;
                if (name == "rscov_mp") s.rscov_mp = m;
                if (name == "rscov_mn") s.rscov_mn = m;
            }
            out.push_back(std::move(s));
            i = end;
        }
    } catch (const IntegrityError&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("covariance table: ") + e.what());
    }
    return out;
}

MeasureStore::MeasureStore(std::filesystem::path root)
    : root_(std::move(root)), snap_(std::make_shared<const MeasureSnapshot>()) {
    reload();
}

void MeasureStore::reload() {
    MeasureSnapshot snap;
    for (auto c : kClasses) {
        const auto dir = root_ / std::string(asset_class_dir(c));
        if (!std::filesystem::is_directory(dir)) continue;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() != ".parquet") continue;
            try {
                const auto table = io::read_parquet(entry.path());
                if (entry.path().filename() == kCovFile) {
                    snap.covariances[c] = covariances_from_table(table);
                } else {
                    auto rows = measures_from_table(table);
                    if (rows.empty()) continue;
                    sort_rows(rows);
                    snap.rows[c][rows.front().symbol] = std::move(rows);
                }
            } catch (const IntegrityError& e) {
                spdlog::error("skipping unreadable measure file {}: {}", entry.path().string(), e.what());
            }
        }
    }
    install(std::move(snap));
}

std::shared_ptr<const MeasureSnapshot> MeasureStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return snap_;
}

void MeasureStore::install(MeasureSnapshot snap) {
    auto next = std::make_shared<const MeasureSnapshot>(std::move(snap));
    std::lock_guard lock(mutex_);
    snap_ = std::move(next);
}

void MeasureStore::write_measures(AssetClass asset_class, const std::vector<DailyMeasures>& rows) {
    std::map<std::string, std::vector<DailyMeasures>> by_symbol;
    for (const auto& r : rows) by_symbol[r.symbol].push_back(r);
    const auto dir = root_ / std::string(asset_class_dir(asset_class));
    std::filesystem::create_directories(dir);
    const auto current = snapshot();
    for (auto& [symbol, fresh] : by_symbol) {
        std::map<Date, DailyMeasures> merged;
        if (auto cls = current->rows.find(asset_class); cls != current->rows.end()) {
            if (auto it = cls->second.find(symbol); it != cls->second.end()) {
                for (const auto& r : it->second) merged[r.date] = r;
            }
        }
        for (auto& r : fresh) merged[r.date] = r;
        std::vector<DailyMeasures> out;
        for (auto& [d, r] : merged) out.push_back(std::move(r));
        io::write_parquet(measures_to_table(out), dir / (symbol + ".parquet"));
    }
    reload();
}

void MeasureStore::write_covariances(AssetClass asset_class, const std::vector<CovarianceSet>& sets) {
    const auto dir = root_ / std::string(asset_class_dir(asset_class));
    std::filesystem::create_directories(dir);
    std::map<Date, CovarianceSet> merged;
    const auto current = snapshot();
    if (auto it = current->covariances.find(asset_class); it != current->covariances.end()) {
        for (const auto& s : it->second) merged[s.date] = s;
    }
    for (const auto& s : sets) merged[s.date] = s;
    std::vector<CovarianceSet> out;
    for (auto& [d, s] : merged) out.push_back(std::move(s));
    io::write_parquet(covariances_to_table(out), dir / kCovFile);
    reload();
}

}  // namespace rvkit
