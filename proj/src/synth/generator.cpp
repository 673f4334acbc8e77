#include "rvkit/synth/generator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rvkit/common/dates.hpp"

namespace rvkit {

SimulatedDay simulate_day(std::mt19937_64& rng, AssetClass asset_class, const std::string& symbol,
                          const TradingSession& session, const TickSimSpec& spec) {
    if (!(spec.daily_variance >= 0.0) || !(spec.mean_gap_s > 0.0) || !(spec.start_price > 0.0)) {
        throw std::invalid_argument("simulate_day: invalid specification");
    }
    const bool stock = asset_class == AssetClass::stock;
    const double len_ms = static_cast<double>(session.length().count());
    std::exponential_distribution<double> gap(1.0 / (spec.mean_gap_s * 1000.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);

    // Arrival offsets from the open, in milliseconds.
    std::vector<std::int64_t> offsets;
    double t = 1.0 + 998.0 * unit(rng);
    while (t <= len_ms) {
        offsets.push_back(static_cast<std::int64_t>(t));
        t += gap(rng);
    }
    if (!stock) {
        for (auto& o : offsets) o = std::max<std::int64_t>(1000, (o + 999) / 1000 * 1000);
        // A tick rounded up onto a midnight close would read as 24:00:00, which is not a time of day.
        const std::int64_t last = std::min<std::int64_t>(static_cast<std::int64_t>(len_ms),
                                                         (kDayLength - session.open).count() - 1000);
        offsets.erase(std::remove_if(offsets.begin(), offsets.end(), [&](std::int64_t o) { return o > last; }),
                      offsets.end());
    }
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

    std::vector<double> jump_at;
    std::vector<double> jump_val;
    for (int j = 0; j < spec.jumps; ++j) {
        jump_at.push_back(len_ms * unit(rng));
        jump_val.push_back(unit(rng) < 0.5 ? -spec.jump_size : spec.jump_size);
    }

    SimulatedDay out;
    out.series.symbol = symbol;
    out.series.date = session.date;
    out.series.asset_class = asset_class;
    out.iv = spec.daily_variance;
    for (double v : jump_val) out.jump_variation += v * v;

    const double sigma_ms = std::sqrt(spec.daily_variance / len_ms);
    double x = std::log(spec.start_price);
    double prev = 0.0;
    std::uniform_int_distribution<std::int64_t> odd(1, 99);
    std::geometric_distribution<std::int64_t> lots(0.5);
    for (auto o : offsets) {
        const double now = static_cast<double>(o);
        x += sigma_ms * std::sqrt(now - prev) * z(rng);
        for (std::size_t j = 0; j < jump_at.size(); ++j) {
            if (jump_at[j] > prev && jump_at[j] <= now) x += jump_val[j];
        }
        prev = now;
        double p = std::exp(x + spec.noise_sd * z(rng));
        TickRecord r;
        r.time = session.open + Millis{o};
        if (stock) {
            if (spec.spike_share > 0.0 && unit(rng) < spec.spike_share) {
                p *= unit(rng) < 0.5 ? 1.0 - spec.spike_size : 1.0 + spec.spike_size;
                ++out.spikes;
            }
            r.price = p;
            r.volume = unit(rng) < spec.odd_lot_share ? odd(rng) : 100 * (1 + lots(rng));
        } else {
            r.price = p;
            r.bid = p * (1.0 - spec.spread / 2.0);
            r.ask = p * (1.0 + spec.spread / 2.0);
        }
        out.series.records.push_back(r);
    }
    for (std::size_t j = 0; j < jump_at.size(); ++j) {
        if (jump_at[j] > prev) x += jump_val[j];
    }
    out.close_price = std::exp(x);
    return out;
}

void write_tick_csv(std::ostream& out, std::span<const TickSeries> days, bool header) {
    if (header) out << "Date,Time,Price,Bid,Ask,Volume\n";
    for (const auto& d : days) {
        const auto date = format_date(d.date);
        for (const auto& r : d.records) {
            out << date << ',' << format_time_of_day(r.time) << ',' << fmt::format("{:.6f}", r.price) << ',';
            if (r.bid) out << fmt::format("{:.8f}", *r.bid);
            out << ',';
            if (r.ask) out << fmt::format("{:.8f}", *r.ask);
            out << ',';
            if (r.volume) out << *r.volume;
            out << '\n';
        }
    }
}

std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec,
                                                const HolidayCalendar& calendar) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> paths;
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t s = 0; s < spec.symbols.size(); ++s) {
        std::mt19937_64 rng(spec.seed * 1000003ULL + s);
        const auto path = dir / (spec.symbols[s] + ".csv");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("write_corpus: cannot write " + path.string());
        out << "Date,Time,Price,Bid,Ask,Volume\n";
        TickSimSpec ticks = spec.ticks;
        ticks.start_price = spec.ticks.start_price * (1.0 + 0.5 * static_cast<double>(s));
        for (Date d = spec.from; d <= spec.to; d = add_days(d, 1)) {
            const auto session = session_for(spec.asset_class, d, calendar);
            if (!session) continue;
            const double disp = spec.variance_dispersion;
            TickSimSpec day = ticks;
            day.daily_variance = ticks.daily_variance * std::exp(disp * z(rng) - disp * disp / 2.0);
            auto sim = simulate_day(rng, spec.asset_class, spec.symbols[s], *session, day);
            const std::array<TickSeries, 1> one{std::move(sim.series)};
            write_tick_csv(out, one, false);
            ticks.start_price = sim.close_price;
        }
        paths.push_back(path);
    }
    return paths;
}

MemPathSim simulate_mem(std::mt19937_64& rng, ModelFamily family, const Eigen::VectorXd& th, std::size_t n,
                        double gamma_shape, std::size_t burn_in) {
    double w = th(0), a1 = th(1), a2 = 0.0, b = 0.0, g = 0.0;
    switch (family) {
        case ModelFamily::mem11: b = th(2); break;
        case ModelFamily::amem11: b = th(2); g = th(3); break;
        case ModelFamily::amem21: a2 = th(2); b = th(3); g = th(4); break;
        default: throw std::invalid_argument("simulate_mem: not a MEM family");
    }
    std::gamma_distribution<double> eps(gamma_shape, 1.0 / gamma_shape);
    std::bernoulli_distribution coin(0.5);
    const double pers = a1 + a2 + b + g / 2.0;
    double mu = w / (1.0 - pers);
    double y1 = mu, y2 = mu;
    bool neg1 = false;
    MemPathSim out;
    for (std::size_t t = 0; t < n + burn_in; ++t) {
        mu = w + a1 * y1 + a2 * y2 + b * mu + g * (neg1 ? y1 : 0.0);
        const double y = mu * eps(rng);
        const bool neg = coin(rng);
        if (t >= burn_in) {
            out.y.push_back(y);
            out.negative.push_back(neg);
        }
        y2 = y1;
        y1 = y;
        neg1 = neg;
    }
    return out;
}

std::vector<double> simulate_har(std::mt19937_64& rng, const Eigen::VectorXd& beta, std::size_t n, double sd,
                                 double floor, std::size_t burn_in) {
    std::normal_distribution<double> z(0.0, sd);
    const double mean = beta(0) / (1.0 - beta(1) - beta(2) - beta(3) * 17.0 / 16.0);
    std::vector<double> y(22, mean);
    for (std::size_t t = 22; t < n + burn_in + 22; ++t) {
        double wk = 0.0, mo = 0.0;
        for (std::size_t i = 2; i <= 5; ++i) wk += y[t - i];
        for (std::size_t i = 6; i <= 22; ++i) mo += y[t - i];
        y.push_back(std::max(floor, beta(0) + beta(1) * y[t - 1] + beta(2) * wk / 4.0 + beta(3) * mo / 16.0 + z(rng)));
    }
    return {y.end() - static_cast<std::ptrdiff_t>(n), y.end()};
}

}  // namespace rvkit
