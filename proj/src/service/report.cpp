#include "rvkit/service/report.hpp"

#include <cmath>

namespace rvkit {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

namespace {

json opt(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }

json test_json(double stat, double p) { return {{"stat", number_or_null(stat)}, {"p_value", number_or_null(p)}}; }

}  // namespace

json fit_to_json(const ModelFit& fit) {
    json params = json::array();
    for (std::size_t i = 0; i < fit.param_names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        params.push_back({{"name", fit.param_names[i]},
                          {"estimate", number_or_null(fit.params(k))},
                          {"se", number_or_null(fit.std_errors(k))},
                          {"z", number_or_null(fit.z_stats(k))},
                          {"p", number_or_null(fit.p_values(k))},
                          {"pinned", i < fit.pinned.size() && fit.pinned[i]}});
    }
    const auto& d = fit.diagnostics;
    return {
        {"family", std::string(to_string(fit.spec.family))},
        {"measure", fit.spec.measure},
        {"scale", fit.spec.scale() == ModelScale::daily_variance ? "daily_variance" : "annualized_vol"},
        {"n_obs", fit.n_obs},
        {"params", params},
        {"loglik", opt(fit.loglik)},
        {"r2", opt(fit.r2)},
        {"sigma2_hat", opt(fit.sigma2_hat)},
        {"hac_lags", fit.hac_lags},
        {"iterations", fit.iterations},
        {"retried", fit.retried},
        {"diagnostics",
         {{"ljung_box", test_json(d.lb_stat, d.lb_pvalue)},
          {"ljung_box_squared", test_json(d.lb2_stat, d.lb2_pvalue)},
          {"arch_lm", test_json(d.arch_stat, d.arch_pvalue)},
          {"lags", kDiagnosticLags}}},
    };
}

json forecast_to_json(const ForecastResult& fc) {
    auto arr = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(number_or_null(x));
        return a;
    };
    return {{"horizon", fc.horizon},       {"point", arr(fc.point)}, {"ci_low", arr(fc.ci_low)},
            {"ci_high", arr(fc.ci_high)},  {"actual", arr(fc.actuals)},
            {"mse", number_or_null(fc.mse)}, {"qlike", opt(fc.qlike)}};
}

json summary_to_json(const std::map<std::string, ParameterSummary>& summary) {
    json out = json::object();
    for (const auto& [name, s] : summary) {
        out[name] = {{"n", s.n},
                     {"mean", number_or_null(s.mean)},
                     {"std", number_or_null(s.std)},
                     {"min", number_or_null(s.min)},
                     {"median", number_or_null(s.median)},
                     {"max", number_or_null(s.max)},
                     {"pct_significant", number_or_null(s.pct_significant)}};
    }
    return out;
}

json stats_to_json(const SummaryStats& s) {
    return {{"avg_vol", opt(s.avg_vol)},
            {"vol_of_vol", opt(s.vol_of_vol)},
            {"avg_return", opt(s.avg_return)},
            {"avg_volume", opt(s.avg_volume)}};
}

}  // namespace rvkit
