#include "rvkit/models/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rvkit/common/errors.hpp"
#include "rvkit/models/har.hpp"
#include "rvkit/models/mem.hpp"

namespace rvkit {

double empirical_quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("empirical_quantile: q must lie in [0, 1]");
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mse_loss(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size() || actual.empty()) throw std::invalid_argument("mse_loss: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) s += (actual[i] - forecast[i]) * (actual[i] - forecast[i]);
    return s / static_cast<double>(actual.size());
}

std::optional<double> qlike_loss(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size() || actual.empty()) throw std::invalid_argument("qlike_loss: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!(forecast[i] > 0.0) || !(actual[i] > 0.0)) return std::nullopt;
        const double r = actual[i] / forecast[i];
        s += r - std::log(r) - 1.0;
    }
    return s / static_cast<double>(actual.size());
}

ForecastResult forecast(const ModelFit& fit, const ModelData& data, std::size_t max_h) {
    const std::size_t t0 = fit.n_obs;
    if (data.y.size() < t0) throw std::invalid_argument("forecast: data is shorter than the estimation window");
    const std::size_t later = data.y.size() - t0;
    if (later < kMinHorizon) {
        throw InsufficientDataError("forecast needs at least " + std::to_string(kMinHorizon) +
                                    " observations after the estimation window, got " + std::to_string(later));
    }
    ForecastResult out;
    out.horizon = std::min({later, max_h, kMaxHorizon});
    const std::size_t end = t0 + out.horizon;
    const std::span<const double> y(data.y.data(), end);
    out.actuals.assign(y.begin() + static_cast<std::ptrdiff_t>(t0), y.end());

    double q_lo = 0.0;
    double q_hi = 0.0;
    if (is_har_family(fit.spec.family)) {
        const bool q = fit.spec.family == ModelFamily::harq;
        const std::span<const double> rq = q ? std::span<const double>(data.rq.data(), std::min(end, data.rq.size()))
                                             : std::span<const double>{};
        const auto design = build_har_design(y, fit.spec.family, rq, fit.rq_sqrt_mean);
        for (std::size_t t = t0; t < end; ++t) {
            out.point.push_back(design.x.row(static_cast<Eigen::Index>(t - kHarMaxLag)).dot(fit.params));
        }
        q_lo = empirical_quantile(fit.residuals, 0.025);
        q_hi = empirical_quantile(fit.residuals, 0.975);
        for (double p : out.point) {
            out.ci_low.push_back(std::max(p + q_lo, 0.0));
            out.ci_high.push_back(p + q_hi);
        }
    } else {
        std::vector<bool> neg = data.negative;
        neg.resize(end, false);
        const auto path = mem_filter(fit.spec.family, fit.params, y, neg, fit.y_mean);
        out.point.assign(path.mu.begin() + static_cast<std::ptrdiff_t>(t0), path.mu.end());
        std::vector<double> eps(fit.residuals.size());
        for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = fit.residuals[i] + 1.0;
        q_lo = empirical_quantile(eps, 0.025);
        q_hi = empirical_quantile(eps, 0.975);
        for (double p : out.point) {
            out.ci_low.push_back(p * q_lo);
            out.ci_high.push_back(p * q_hi);
        }
    }
    out.mse = mse_loss(out.actuals, out.point);
    out.qlike = qlike_loss(out.actuals, out.point);
    return out;
}

std::map<std::string, ParameterSummary> summarize_fits(std::span<const ModelFit> fits, double level) {
    std::map<std::string, ParameterSummary> out;
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, std::size_t> significant;
    for (const auto& f : fits) {
        for (std::size_t i = 0; i < f.param_names.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            values[f.param_names[i]].push_back(f.params(k));
            if (f.p_values.size() > k && f.p_values(k) < level) ++significant[f.param_names[i]];
        }
    }
    for (auto& [name, v] : values) {
        ParameterSummary s;
        s.n = v.size();
        double sum = 0.0;
        for (double x : v) sum += x;
        s.mean = sum / static_cast<double>(s.n);
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
        s.min = *std::min_element(v.begin(), v.end());
        s.max = *std::max_element(v.begin(), v.end());
        s.median = empirical_quantile(v, 0.5);
        s.pct_significant = 100.0 * static_cast<double>(significant[name]) / static_cast<double>(s.n);
        out[name] = s;
    }
    return out;
}

}  // namespace rvkit
