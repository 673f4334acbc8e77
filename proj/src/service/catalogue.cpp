#include "rvkit/service/catalogue.hpp"

#include <algorithm>
#include <vector>

namespace rvkit {

namespace {

struct Row {
    const char* symbol;
    const char* name;
    const char* sector;
    const char* exchange;
    const char* first;
    bool dow30;
};

constexpr Row kStocks[] = {
    {"AAPL", "Apple Inc.", "Information Technology", "", "2015-01-02", true},
    {"ADBE", "Adobe Inc.", "Information Technology", "", "2015-01-02", false},
    {"AMD", "Advanced Micro Devices", "Information Technology", "", "2015-01-02", false},
    {"AMGN", "Amgen Inc.", "Health Care", "", "2015-01-02", true},
    {"AMZN", "Amazon", "Consumer Discretionary", "", "2015-01-02", true},
    {"AXP", "American Express", "Finance", "", "2015-01-02", true},
    {"BA", "Boeing", "Industrials", "", "2015-01-02", true},
    {"CAT", "Caterpillar Inc.", "Industrials", "", "2015-01-02", true},
    {"CRM", "Salesforce Inc.", "Information Technology", "", "2015-01-02", true},
    {"CSCO", "Cisco", "Information Technology", "", "2015-01-02", true},
    {"CVX", "Chevron Corporation", "Energy", "", "2015-01-02", true},
    {"DIS", "Walt Disney Company (The)", "Communication Services", "", "2015-01-02", true},
    {"GE", "GE Aerospace", "Industrials", "", "2015-01-02", false},
    {"GOOGL", "Alphabet Inc. (Class A)", "Communication Services", "", "2015-01-02", false},
    {"GS", "Goldman Sachs", "Finance", "", "2015-01-02", true},
    {"HD", "Home Depot", "Consumer Discretionary", "", "2015-01-02", true},
    {"HON", "Honeywell International Inc.", "Industrials", "", "2015-01-02", true},
    {"IBM", "IBM", "Information Technology", "", "2015-01-02", true},
    {"JNJ", "Johnson & Johnson", "Health Care", "", "2015-01-02", true},
    {"JPM", "JPMorgan Chase", "Finance", "", "2015-01-02", true},
    {"KO", "Coca-Cola Company (The)", "Consumer Staples", "", "2015-01-02", true},
    {"MCD", "McDonald's", "Consumer Discretionary", "", "2015-01-02", true},
    {"META", "Meta Platforms", "Communication Services", "", "2015-01-02", false},
    {"MMM", "3M", "Industrials", "", "2015-01-02", true},
    {"MRK", "Merck & Company Inc.", "Health Care", "", "2015-01-02", true},
    {"MSFT", "Microsoft", "Information Technology", "", "2015-01-02", true},
    {"NFLX", "Netflix, Inc.", "Communication Services", "", "2015-01-02", false},
    {"NKE", "Nike, Inc.", "Consumer Discretionary", "", "2015-01-02", true},
    {"NVDA", "Nvidia", "Information Technology", "", "2015-01-02", true},
    {"ORCL", "Oracle Corporation", "Information Technology", "", "2015-01-02", false},
    {"PG", "Procter & Gamble", "Consumer Staples", "", "2015-01-02", true},
    {"PM", "Philip Morris International", "Consumer Staples", "", "2015-01-02", false},
    {"SHW", "Sherwin-Williams Company", "Consumer Discretionary", "", "2015-01-02", true},
    {"TRV", "The Travelers Companies Inc.", "Finance", "", "2015-01-02", true},
    {"TSLA", "Tesla, Inc.", "Consumer Discretionary", "", "2015-01-02", false},
    {"UNH", "Unitedhealth Group Inc.", "Health Care", "", "2015-01-02", true},
    {"V", "Visa Inc.", "Finance", "", "2015-01-02", true},
    {"VZ", "Verizon Communications Inc.", "Public Utilities", "", "2015-01-02", true},
    {"WMT", "Walmart", "Consumer Staples", "", "2015-01-02", true},
    {"XOM", "ExxonMobil", "Energy", "", "2015-01-02", false},
};

constexpr Row kFx[] = {
    {"AUDUSD", "Australian dollar / US dollar", "", "", "2009-09-25", false},
    {"EURUSD", "Euro / US dollar", "", "", "2009-09-25", false},
    {"GBPUSD", "British pound / US dollar", "", "", "2009-09-25", false},
    {"USDCAD", "US dollar / Canadian dollar", "", "", "2009-09-25", false},
    {"USDJPY", "US dollar / Japanese yen", "", "", "2009-09-28", false},
};

constexpr Row kFutures[] = {
    {"CL", "Crude Oil", "Energy", "NYMEX", "2009-09-28", false},
    {"NG", "Natural Gas", "Energy", "NYMEX", "2009-09-28", false},
    {"GC", "Gold", "Metals", "COMEX", "2009-09-28", false},
    {"C", "Corn", "Agricultural", "CME", "2009-09-28", false},
    {"ES", "E-mini S&P 500", "Equity Index", "CME", "2009-09-28", false},
};

std::vector<AssetInfo> build() {
    std::vector<AssetInfo> out;
    auto add = [&](AssetClass c, std::span<const Row> rows) {
        for (const auto& r : rows) {
            out.push_back({c, r.symbol, r.name, r.sector, r.exchange, parse_date(r.first), r.dow30});
        }
    };
    add(AssetClass::stock, kStocks);
    add(AssetClass::exchange_rate, kFx);
    add(AssetClass::future, kFutures);
    return out;
}

}  // namespace

std::span<const AssetInfo> reference_assets() {
    static const std::vector<AssetInfo> assets = build();
    return assets;
}

std::optional<AssetInfo> find_reference_asset(std::string_view symbol) {
    const auto all = reference_assets();
    auto it = std::find_if(all.begin(), all.end(), [&](const AssetInfo& a) { return a.symbol == symbol; });
    if (it == all.end()) return std::nullopt;
    return *it;
}

}  // namespace rvkit
