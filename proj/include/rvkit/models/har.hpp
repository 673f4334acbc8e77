#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>

#include "rvkit/models/types.hpp"

namespace rvkit {

/// Number of lags in the longest HAR component.
inline constexpr std::size_t kHarMaxLag = 22;

struct HarDesign {
    Eigen::MatrixXd x;       // rows t = 22..T-1 (0-based); columns 1, daily, weekly, monthly [, rq term]
    Eigen::VectorXd target;  // y_t on the same rows
    double rq_sqrt_mean = 0.0;
};

/// Regressors for HAR or HARQ. For HARQ, `rq` must align with `y`; the interaction term is
/// demeaned by `rq_sqrt_mean` when given, otherwise by the mean of sqrt(rq) over the input.
/// Throws InsufficientDataError when |y| < 23.
HarDesign build_har_design(std::span<const double> y, ModelFamily family, std::span<const double> rq = {},
                           std::optional<double> rq_sqrt_mean = std::nullopt);

/// floor(4 (T/100)^(2/9)).
int newey_west_lags(std::size_t t);

/// (X'X)^-1 S (X'X)^-1 with Bartlett weights 1 - l/(L+1). Throws NumericalError for singular X'X.
Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& x, const Eigen::VectorXd& e, int lags);

/// OLS with HAC inference and residual diagnostics. `data.y` is the estimation window.
/// Throws InsufficientDataError below the minimum window and NumericalError on rank deficiency.
ModelFit fit_har(const ModelData& data, ModelFamily family, const std::string& measure = "rv5");

}  // namespace rvkit
