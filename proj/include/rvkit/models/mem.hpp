#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "rvkit/models/types.hpp"

namespace rvkit {

/// Parameter order: MEM11 (omega, alpha1, beta1); AMEM11 (omega, alpha1, beta1, gamma1);
/// AMEM21 (omega, alpha1, alpha2, beta1, gamma1).
std::vector<std::string> mem_param_names(ModelFamily family);

/// alpha1 + beta1 (+ gamma1/2) (+ alpha2).
double mem_persistence(ModelFamily family, const Eigen::VectorXd& theta);

/// Upper bound used for persistence and beta1.
inline constexpr double kPersistenceCap = 1.0 - 1e-6;
inline constexpr double kOmegaFloor = 1e-8;

/// Constraint values c(theta) >= 0 for the family.
Eigen::VectorXd mem_constraints(ModelFamily family, const Eigen::VectorXd& theta);
Eigen::MatrixXd mem_constraint_jacobian(ModelFamily family, const Eigen::VectorXd& theta);
/// True when every constraint holds, with `tol` slack on the non-strict ones.
bool mem_admissible(ModelFamily family, const Eigen::VectorXd& theta, double tol = 0.0);

struct MemPath {
    std::vector<double> mu;
    /// d mu_t / d theta, one row per t. Filled only on request.
    Eigen::MatrixXd dmu;
};

/// Conditional means for every t of `y`. mu_0 is the unconditional mean omega / (1 - persistence);
/// AMEM(2,1) uses `presample_y` for y_{-1}. `negative[t]` flags r_t < 0 (AMEM only).
/// Throws NumericalError if some mu_t <= 0.
MemPath mem_filter(ModelFamily family, const Eigen::VectorXd& theta, std::span<const double> y,
                   const std::vector<bool>& negative, double presample_y, bool with_gradient = false);

/// sum_t [log(y_t / mu_t) - y_t / mu_t + 1]; fills `grad` when non-null. -inf when the filter fails.
double mem_loglik(ModelFamily family, const Eigen::VectorXd& theta, std::span<const double> y,
                  const std::vector<bool>& negative, double presample_y, Eigen::VectorXd* grad = nullptr);

struct MemFitOptions {
    /// Parameters held at the given value (same order as mem_param_names).
    std::vector<std::optional<double>> pins;
    std::optional<Eigen::VectorXd> start;
    int max_iterations = 500;
    double rel_tolerance = 1e-8;
    unsigned retry_seed = 20240311u;
};

/// Constrained QML fit. `data.y` must be strictly positive (annualized volatility).
/// Throws InsufficientDataError below the minimum window, std::invalid_argument for zeros,
/// and NumericalError when both the initial and the perturbed start fail to converge.
ModelFit fit_mem(const ModelData& data, ModelFamily family, const std::string& measure = "rv5",
                 const MemFitOptions& opt = {});

/// Same as fit_mem but without the minimum window check; for simulation studies.
ModelFit fit_mem_unchecked(const ModelData& data, ModelFamily family, const std::string& measure,
                           const MemFitOptions& opt);

}  // namespace rvkit
