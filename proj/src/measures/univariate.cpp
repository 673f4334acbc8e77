#include "rvkit/measures/univariate.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <stdexcept>

namespace rvkit {

namespace {

constexpr double kInvFourLn2 = 1.0 / (4.0 * std::numbers::ln2);
constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }

}  // namespace

RangeMeasures range_measures(double high, double low, double open, double close,
                             std::span<const PriceRange> intervals) {
    if (!(low > 0.0) || !(open > 0.0) || !(close > 0.0)) throw std::invalid_argument("range prices must be positive");
    if (high < low) throw std::invalid_argument("high below low");
    RangeMeasures out;
    const double hl = std::log(high / low);
    const double co = std::log(close / open);
    out.pr = kInvFourLn2 * hl * hl;
    out.gkr = 0.5 * hl * hl - (2.0 * std::numbers::ln2 - 1.0) * co * co;
    for (const auto& iv : intervals) {
        if (iv.high < iv.low || !(iv.low > 0.0)) throw std::invalid_argument("interval high below low");
        out.rr += sq(std::log(iv.high / iv.low));
    }
    out.rr *= kInvFourLn2;
    return out;
}

double realized_variance(std::span<const double> r) {
    double s = 0;
    for (double x : r) s += x * x;
    return s;
}

double realized_quarticity(std::span<const double> r) {
    double s = 0;
    for (double x : r) s += sq(x * x);
    return static_cast<double>(r.size()) / 3.0 * s;
}

double bipower_variation(std::span<const double> r) {
    double s = 0;
    for (std::size_t i = 1; i < r.size(); ++i) s += std::fabs(r[i]) * std::fabs(r[i - 1]);
    return kPi / 2.0 * s;
}

std::optional<ReturnMeasures> return_based_measures(std::span<const double> r) {
    const std::size_t m = r.size();
    if (m < 2) return std::nullopt;
    ReturnMeasures out;
    out.rv = realized_variance(r);
    out.rq = realized_quarticity(r);
    out.bv = bipower_variation(r);
    for (double x : r) {
        if (x > 0) out.rsp += x * x;
        else if (x < 0) out.rsn += x * x;
    }
    const auto md = static_cast<double>(m);
    double mins = 0;
    for (std::size_t i = 1; i < m; ++i) mins += sq(std::min(std::fabs(r[i - 1]), std::fabs(r[i])));
    out.minrv = kPi / (kPi - 2.0) * md / (md - 1.0) * mins;
    if (m >= 3) {
        double meds = 0;
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const double a = std::fabs(r[i - 1]);
            const double b = std::fabs(r[i]);
            const double c = std::fabs(r[i + 1]);
            meds += sq(std::max(std::min(a, b), std::min(std::max(a, b), c)));
        }
        out.medrv = kPi / (6.0 - 4.0 * std::sqrt(3.0) + kPi) * md / (md - 2.0) * meds;
    }
    return out;
}

std::optional<double> pick(const ReturnMeasures& m, ReturnMeasure which) {
    switch (which) {
        case ReturnMeasure::rv: return m.rv;
        case ReturnMeasure::rq: return m.rq;
        case ReturnMeasure::bv: return m.bv;
        case ReturnMeasure::rsp: return m.rsp;
        case ReturnMeasure::rsn: return m.rsn;
        case ReturnMeasure::medrv: return m.medrv;
        case ReturnMeasure::minrv: return m.minrv;
    }
    return std::nullopt;
}

std::optional<double> subsampled_measure(std::span<const RegularGrid> grids, ReturnMeasure which) {
    double sum = 0;
    int used = 0;
    for (const auto& g : grids) {
        const auto r = log_returns(g.prices);
        const auto m = return_based_measures(r);
        if (!m) continue;
        if (const auto v = pick(*m, which)) {
            sum += *v;
            ++used;
        }
    }
    if (used == 0) return std::nullopt;
    return sum / used;
}

double parzen_kernel(double x) {
    if (x < 0.0) throw std::invalid_argument("parzen_kernel: negative argument");
    if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
    if (x <= 1.0) return 2.0 * (1.0 - x) * (1.0 - x) * (1.0 - x);
    return 0.0;
}

double noise_variance(std::span<const double> base_prices, std::span<const double> coarse_prices) {
    std::size_t nonzero = 0;
    for (std::size_t i = 1; i < base_prices.size(); ++i)
        if (base_prices[i] != base_prices[i - 1]) ++nonzero;
    if (nonzero == 0) return 0.0;
    const double rv2 = realized_variance(log_returns(coarse_prices));
    return rv2 / (2.0 * static_cast<double>(nonzero));
}

double sparse_iv(std::span<const double> base_prices, int stride, int offsets) {
    if (stride < 1 || offsets < 1) throw std::invalid_argument("sparse_iv: stride and offsets must be positive");
    const auto L = static_cast<std::size_t>(stride);
    const auto p = std::min(static_cast<std::size_t>(offsets), L);
    const std::size_t n = base_prices.size();
    if (n < L + 1) {
        spdlog::debug("sparse_iv: grid of {} points shorter than one stride of {}; using the base-grid RV", n, L);
        return realized_variance(log_returns(base_prices));
    }
    for (double v : base_prices)
        if (!(v > 0.0)) throw std::invalid_argument("sparse_iv: non-positive price");
    // Each base-grid index i >= L closes exactly one sparse return, on the grid with offset i mod L.
    double sum = 0;
    for (std::size_t i = L; i < n; ++i) {
        if (i % L >= p) continue;
        sum += sq(std::log(base_prices[i] / base_prices[i - L]));
    }
    return sum / static_cast<double>(p);
}

std::vector<double> jitter_endpoints(std::span<const double> prices, int width) {
    std::vector<double> out(prices.begin(), prices.end());
    const auto w = std::min(static_cast<std::size_t>(std::max(width, 1)), out.size());
    if (out.size() < 2 || w < 2) return out;
    double head = 0;
    double tail = 0;
    for (std::size_t i = 0; i < w; ++i) {
        head += prices[i];
        tail += prices[prices.size() - 1 - i];
    }
    out.front() = head / static_cast<double>(w);
    out.back() = tail / static_cast<double>(w);
    return out;
}

KernelResult realized_kernel(std::span<const double> r, double omega2, double iv, double c_star) {
    KernelResult res;
    res.m = r.size();
    res.noise_variance = omega2;
    res.iv = iv;
    const auto m = static_cast<long>(r.size());
    if (m == 0) {
        res.bandwidth = 0;
        return res;
    }
    long H = 1;
    if (omega2 > 0.0 && iv > 0.0) {
        res.bandwidth_star = c_star * std::pow(omega2 / iv, 0.4) * std::pow(static_cast<double>(m), 0.6);
        H = std::lround(res.bandwidth_star);
    } else {
        spdlog::debug("realized_kernel: degenerate noise ratio (omega2={}, iv={}); bandwidth 1", omega2, iv);
    }
    H = std::clamp(H, 1L, std::max(1L, m - 1));
    if (m == 1) H = 0;
    res.bandwidth = static_cast<int>(H);

    double rk = realized_variance(r);
    for (long h = 1; h <= H; ++h) {
        double gamma = 0;
        for (long i = h; i < m; ++i) gamma += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i - h)];
        rk += 2.0 * parzen_kernel(static_cast<double>(h) / static_cast<double>(H + 1)) * gamma;
    }
    res.rk = rk;
    return res;
}

std::optional<KernelResult> realized_kernel(std::span<const TimedPrice> prices, const TradingSession& session,
                                            const KernelConfig& cfg) {
    const auto base = previous_tick_grid(prices, cfg.base_interval, session);
    if (!base || base->size() < 2) return std::nullopt;
    const auto coarse = previous_tick_grid(prices, cfg.noise_rv_interval, session);
    const double omega2 = noise_variance(base->prices, coarse->prices);
    const auto stride = static_cast<int>(cfg.sparse_interval / cfg.base_interval);
    if (base->size() < static_cast<std::size_t>(stride) + 1)
        spdlog::info("{}: session shorter than the sparse interval; IV from the base grid", format_date(session.date));
    const double iv = sparse_iv(base->prices, stride, cfg.sparse_offsets);
    const auto returns = log_returns(jitter_endpoints(base->prices, cfg.jitter_width));
    return realized_kernel(returns, omega2, iv, cfg.c_star);
}

namespace {

using Field = double DailyMeasures::*;

struct NamedField {
    std::string_view name;
    Field field;
};

constexpr std::array<NamedField, 25> kFields{{
    {"pr", &DailyMeasures::pr},           {"gkr", &DailyMeasures::gkr},
    {"rr5", &DailyMeasures::rr5},         {"rv1", &DailyMeasures::rv1},
    {"rv5", &DailyMeasures::rv5},         {"rv5_ss", &DailyMeasures::rv5_ss},
    {"rq1", &DailyMeasures::rq1},         {"rq5", &DailyMeasures::rq5},
    {"rq5_ss", &DailyMeasures::rq5_ss},   {"bv1", &DailyMeasures::bv1},
    {"bv5", &DailyMeasures::bv5},         {"bv5_ss", &DailyMeasures::bv5_ss},
    {"rsp1", &DailyMeasures::rsp1},       {"rsp5", &DailyMeasures::rsp5},
    {"rsp5_ss", &DailyMeasures::rsp5_ss}, {"rsn1", &DailyMeasures::rsn1},
    {"rsn5", &DailyMeasures::rsn5},       {"rsn5_ss", &DailyMeasures::rsn5_ss},
    {"medrv1", &DailyMeasures::medrv1},   {"medrv5", &DailyMeasures::medrv5},
    {"medrv5_ss", &DailyMeasures::medrv5_ss}, {"minrv1", &DailyMeasures::minrv1},
    {"minrv5", &DailyMeasures::minrv5},   {"minrv5_ss", &DailyMeasures::minrv5_ss},
    {"rk", &DailyMeasures::rk},
}};

constexpr std::array<std::string_view, 25> names_of(const std::array<NamedField, 25>& f) {
    std::array<std::string_view, 25> out{};
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].name;
    return out;
}

constexpr auto kNames = names_of(kFields);

void fill(DailyMeasures& d, const std::optional<ReturnMeasures>& m, Field rv, Field rq, Field bv, Field rsp,
          Field rsn, Field medrv, Field minrv) {
    if (!m) return;
    d.*rv = m->rv;
    d.*rq = m->rq;
    d.*bv = m->bv;
    d.*rsp = m->rsp;
    d.*rsn = m->rsn;
    if (m->medrv) d.*medrv = *m->medrv;
    if (m->minrv) d.*minrv = *m->minrv;
}

double or_nan(const std::optional<double>& v) { return v ? *v : NAN; }

}  // namespace

const std::array<std::string_view, 25>& measure_names() { return kNames; }

bool is_measure_name(std::string_view name) {
    return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

std::optional<double> DailyMeasures::get(std::string_view name) const {
    for (const auto& f : kFields)
        if (f.name == name) return this->*f.field;
    return std::nullopt;
}

bool DailyMeasures::set(std::string_view name, double value) {
    for (const auto& f : kFields) {
        if (f.name == name) {
            this->*f.field = value;
            return true;
        }
    }
    return false;
}

std::optional<DailyMeasures> daily_row(const TickSeries& series, const TradingSession& session,
                                       const KernelConfig& cfg, const EligibilityRule& rule) {
    const auto prices = session_prices(series, PriceView::cleaned);
    if (prices.empty()) return std::nullopt;
    const auto g1 = previous_tick_grid(prices, hms(0, 1), session);
    if (!g1 || !is_eligible(*g1, prices, rule)) return std::nullopt;
    const auto g5 = previous_tick_grid(prices, hms(0, 5), session);
    const auto subs = subsample_grids(prices, session);

    DailyMeasures d;
    d.symbol = series.symbol;
    d.date = series.date;

    const TimedPrice* first = nullptr;
    const TimedPrice* last = nullptr;
    for (const auto& p : prices) {
        if (p.odd_lot) continue;
        if (!first) first = &p;
        last = &p;
    }
    if (!first) {
        spdlog::warn("{} {}: every trade is an odd lot; O and C taken from all trades", series.symbol,
                     format_date(series.date));
        first = &prices.front();
        last = &prices.back();
    }
    d.open = first->price;
    d.close = last->price;
    d.high = d.low = prices.front().price;
    for (const auto& p : prices) {
        d.high = std::max(d.high, p.price);
        d.low = std::min(d.low, p.price);
    }
    if (series.asset_class == AssetClass::stock) {
        std::int64_t vol = 0;
        std::int64_t trades = 0;
        for (const auto& r : series.records) {
            if (!r.in_session()) continue;
            vol += r.volume.value_or(0);
            trades += r.trades.value_or(1);
        }
        d.volume = vol;
        d.trades = trades;
    }

    const auto ranges = range_measures(d.high, d.low, d.open, d.close, interval_ranges(prices, session, hms(0, 5)));
    d.pr = ranges.pr;
    d.gkr = ranges.gkr;
    d.rr5 = ranges.rr;

    using D = DailyMeasures;
    fill(d, return_based_measures(log_returns(*g1)), &D::rv1, &D::rq1, &D::bv1, &D::rsp1, &D::rsn1, &D::medrv1,
         &D::minrv1);
    if (g5) {
        fill(d, return_based_measures(log_returns(*g5)), &D::rv5, &D::rq5, &D::bv5, &D::rsp5, &D::rsn5,
             &D::medrv5, &D::minrv5);
    }
    d.rv5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::rv));
    d.rq5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::rq));
    d.bv5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::bv));
    d.rsp5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::rsp));
    d.rsn5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::rsn));
    d.medrv5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::medrv));
    d.minrv5_ss = or_nan(subsampled_measure(subs, ReturnMeasure::minrv));

    if (const auto k = realized_kernel(prices, session, cfg)) {
        d.rk = k->rk;
        d.rk_bandwidth = k->bandwidth;
    }
    return d;
}

}  // namespace rvkit
