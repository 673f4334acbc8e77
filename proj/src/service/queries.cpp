#include "rvkit/service/queries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rvkit/common/errors.hpp"
#include "rvkit/models/har.hpp"
#include "rvkit/models/mem.hpp"

namespace rvkit {

DateWindow default_window(Date today) { return {add_months(today, -13), add_months(today, -1)}; }

std::span<const DailyMeasures> rows_in(std::span<const DailyMeasures> rows, Date from, Date to) {
    auto lo = std::lower_bound(rows.begin(), rows.end(), from, [](const auto& r, Date d) { return r.date < d; });
    auto hi = std::upper_bound(lo, rows.end(), to, [](Date d, const auto& r) { return d < r.date; });
    return {lo, hi};
}

ModelData model_data_from_rows(std::span<const DailyMeasures> rows, const ModelSpec& spec) {
    if (!is_measure_name(spec.measure)) throw std::invalid_argument("unknown measure: " + spec.measure);
    const bool mem = is_mem_family(spec.family);
    const std::string rq_name = quarticity_for(spec.measure);
    ModelData data;
    data.y.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double v = *rows[i].get(spec.measure);
        if (std::isnan(v)) {
            throw std::invalid_argument(spec.measure + " missing on " + format_date(rows[i].date));
        }
        data.y.push_back(mem ? annualize(std::max(0.0, v)) : v);
        if (spec.family == ModelFamily::harq) {
            const double q = *rows[i].get(rq_name);
            if (std::isnan(q)) throw std::invalid_argument(rq_name + " missing on " + format_date(rows[i].date));
            data.rq.push_back(q);
        }
        if (mem) {
            data.negative.push_back(i > 0 && rows[i].close > 0.0 && rows[i - 1].close > 0.0 &&
                                    std::log(rows[i].close / rows[i - 1].close) < 0.0);
        }
    }
    return data;
}

double to_plot_scale(ModelFamily family, double value) {
    return is_har_family(family) ? annualize(std::max(0.0, value)) : value;
}

SummaryStats summary_stats(std::span<const DailyMeasures> rows, const std::string& measure, bool include_volume) {
    SummaryStats s;
    std::vector<double> vol;
    for (const auto& r : rows) {
        const double v = r.get(measure).value_or(NAN);
        if (!std::isnan(v) && v >= 0.0) vol.push_back(annualize(v));
    }
    if (!vol.empty()) {
        // Shifted by the first value so a constant window gives exactly zero dispersion.
        const double n = static_cast<double>(vol.size());
        const double shift = vol.front();
        double dsum = 0.0;
        for (double v : vol) dsum += v - shift;
        const double dmean = dsum / n;
        double ss = 0.0;
        for (double v : vol) ss += (v - shift - dmean) * (v - shift - dmean);
        s.avg_vol = shift + dmean;
        s.vol_of_vol = std::sqrt(ss / n);
    }
    double ret = 0.0;
    std::size_t nret = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].close > 0.0 && rows[i - 1].close > 0.0) {
            ret += std::log(rows[i].close / rows[i - 1].close);
            ++nret;
        }
    }
    if (nret > 0) s.avg_return = ret / static_cast<double>(nret);
    if (include_volume) {
        double vsum = 0.0;
        std::size_t nv = 0;
        for (const auto& r : rows) {
            if (r.volume) {
                vsum += static_cast<double>(*r.volume);
                ++nv;
            }
        }
        if (nv > 0) s.avg_volume = vsum / static_cast<double>(nv);
    }
    return s;
}

ModelFit fit_model(const ModelData& data, const ModelSpec& spec) {
    if (is_har_family(spec.family)) return fit_har(data, spec.family, spec.measure);
    return fit_mem(data, spec.family, spec.measure);
}

EstimationResult estimate(std::span<const DailyMeasures> all, const ModelSpec& spec, Date from, Date to,
                          std::size_t max_h) {
    if (max_h < kMinHorizon || max_h > kMaxHorizon) {
        throw std::invalid_argument("forecast horizon must be between 5 and 22");
    }
    const auto window = rows_in(all, from, to);
    if (window.size() < kMinEstimationObs) {
        throw InsufficientDataError("estimation needs at least " + std::to_string(kMinEstimationObs) +
                                    " observations, the window has " + std::to_string(window.size()));
    }
    const auto end = window.data() + window.size();
    const std::size_t later = static_cast<std::size_t>(all.data() + all.size() - end);
    const std::size_t used_later = std::min(later, max_h);
    const std::span<const DailyMeasures> extended(window.data(), window.size() + used_later);

    EstimationResult out;
    out.later_rows = later;
    const ModelData full = model_data_from_rows(extended, spec);
    ModelData est = full;
    est.y.resize(window.size());
    if (!est.rq.empty()) est.rq.resize(window.size());
    if (!est.negative.empty()) est.negative.resize(window.size());
    out.fit = fit_model(est, spec);
    if (later >= kMinHorizon) out.forecast = forecast(out.fit, full, max_h);
    return out;
}

}  // namespace rvkit
