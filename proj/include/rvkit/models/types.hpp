#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rvkit {

enum class ModelFamily { har, harq, mem11, amem11, amem21 };

std::string_view to_string(ModelFamily f);
/// Accepts "har", "harq", "har-q", "mem11", "mem(1,1)", "amem11", "amem21", ... case-insensitively.
std::optional<ModelFamily> parse_model_family(std::string_view s);

inline bool is_har_family(ModelFamily f) { return f == ModelFamily::har || f == ModelFamily::harq; }
inline bool is_mem_family(ModelFamily f) { return !is_har_family(f); }

enum class ModelScale { daily_variance, annualized_vol };

struct ModelSpec {
    ModelFamily family = ModelFamily::har;
    std::string measure = "rv5";

    [[nodiscard]] ModelScale scale() const {
        return is_har_family(family) ? ModelScale::daily_variance : ModelScale::annualized_vol;
    }
};

/// Minimum estimation window length.
inline constexpr std::size_t kMinEstimationObs = 750;
/// Forecast horizon bounds.
inline constexpr std::size_t kMinHorizon = 5;
inline constexpr std::size_t kMaxHorizon = 22;
inline constexpr int kDiagnosticLags = 5;

struct DiagnosticsReport {
    double lb_stat = 0.0;
    double lb_pvalue = 1.0;
    double lb2_stat = 0.0;
    double lb2_pvalue = 1.0;
    double arch_stat = 0.0;
    double arch_pvalue = 1.0;
};

struct ModelFit {
    ModelSpec spec;
    std::vector<std::string> param_names;
    Eigen::VectorXd params;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd z_stats;
    Eigen::VectorXd p_values;
    Eigen::MatrixXd covariance;
    /// Which parameters were held fixed during estimation; their inference entries are NaN.
    std::vector<bool> pinned;

    std::optional<double> loglik;      // MEM family
    std::optional<double> r2;          // HAR family
    std::optional<double> sigma2_hat;  // MEM family

    /// HAR: y_t - yhat_t on regression rows. MEM: eps_t - 1.
    std::vector<double> residuals;
    /// HAR: yhat_t; MEM: mu_t. Aligned with `fitted_offset`.
    std::vector<double> fitted;
    /// Index into the estimation window of the first fitted value.
    std::size_t fitted_offset = 0;
    DiagnosticsReport diagnostics;

    std::size_t n_obs = 0;
    int hac_lags = 0;
    int iterations = 0;
    bool retried = false;

    /// Frozen mean of sqrt(rq) over the estimation window (HARQ).
    double rq_sqrt_mean = 0.0;
    /// Mean of y over the estimation window, used for AMEM(2,1) pre-sample lags.
    double y_mean = 0.0;
};

/// Series fed to fits and forecasts. `rq` only for HARQ, `negative` only for AMEM models.
/// For forecasting the vectors extend past the estimation window.
struct ModelData {
    std::vector<double> y;
    std::vector<double> rq;
    std::vector<bool> negative;
};

/// sqrt(252 * variance) * 100. Throws std::domain_error for negative input.
double annualize(double variance);

/// Name of the quarticity column that pairs with a variance measure for HARQ.
std::string quarticity_for(std::string_view measure);

}  // namespace rvkit
