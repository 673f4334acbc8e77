#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rvkit/ingest/calendar.hpp"
#include "rvkit/ingest/types.hpp"
#include "rvkit/models/types.hpp"

namespace rvkit {

/// Tick-level simulator: Brownian log price with constant spot volatility, optional
/// fixed-size jumps, i.i.d. additive log-price noise and isolated price spikes.
struct TickSimSpec {
    /// Integrated variance of the efficient log price over the session.
    double daily_variance = 1e-4;
    /// Mean exponential waiting time between ticks.
    double mean_gap_s = 2.0;
    double noise_sd = 0.0;
    int jumps = 0;
    double jump_size = 0.0;
    double start_price = 100.0;
    /// Share of stock trades below 100 shares.
    double odd_lot_share = 0.1;
    /// Probability that a tick is replaced by a spike of relative size `spike_size`.
    double spike_share = 0.0;
    double spike_size = 0.05;
    /// Relative bid-ask spread for quote-driven classes.
    double spread = 2e-4;
};

struct SimulatedDay {
    TickSeries series;
    double iv = 0.0;
    /// Sum of squared jumps in the efficient price.
    double jump_variation = 0.0;
    double close_price = 0.0;
    std::size_t spikes = 0;
};

/// One session of ticks. Stock times have millisecond precision; exchange rates and futures
/// tick on whole seconds. The first tick lands in the first second after the open.
SimulatedDay simulate_day(std::mt19937_64& rng, AssetClass asset_class, const std::string& symbol,
                          const TradingSession& session, const TickSimSpec& spec);

/// Raw text in the parser's header layout: Date,Time,Price,Bid,Ask,Volume.
void write_tick_csv(std::ostream& out, std::span<const TickSeries> days, bool header = true);

struct CorpusSpec {
    AssetClass asset_class = AssetClass::stock;
    std::vector<std::string> symbols;
    Date from{};
    Date to{};
    TickSimSpec ticks;
    /// Day-to-day log-normal variation of the daily variance.
    double variance_dispersion = 0.3;
    std::uint64_t seed = 1;
};

/// Writes one raw file per symbol, <dir>/<SYMBOL>.csv, covering every session in [from, to].
/// Returns the written paths.
std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec,
                                                const HolidayCalendar& calendar);

/// MEM(1,1)-family path with unit-mean Gamma(shape, 1/shape) innovations. `theta` follows
/// mem_param_names. Return signs are drawn independently with probability 1/2 of being negative.
struct MemPathSim {
    std::vector<double> y;
    std::vector<bool> negative;
};
MemPathSim simulate_mem(std::mt19937_64& rng, ModelFamily family, const Eigen::VectorXd& theta, std::size_t n,
                        double gamma_shape, std::size_t burn_in = 500);

/// HAR path y_t = w + ad y_{t-1} + aw weekly + am monthly + e_t with e_t ~ N(0, sd^2), floored at `floor`.
std::vector<double> simulate_har(std::mt19937_64& rng, const Eigen::VectorXd& beta, std::size_t n, double sd,
                                 double floor = 1e-8, std::size_t burn_in = 200);

}  // namespace rvkit
