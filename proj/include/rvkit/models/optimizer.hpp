#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace rvkit {

/// Smooth inequality constraints c(x) >= 0 with their Jacobian (one row per constraint).
struct ConstraintSet {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

/// Objective returning f(x) and writing its gradient. Returns +inf outside the domain.
using SmoothObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct SqpOptions {
    int max_iterations = 500;
    double rel_tolerance = 1e-8;
    /// Accepted constraint violation at trial points; absorbs rounding on active linear constraints.
    double feasibility_tolerance = 1e-12;
};

struct SqpResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd lambda;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Minimizes `f` subject to c(x) >= 0 from a feasible start. Each step solves the QP
/// min g'd + d'Bd/2 s.t. c + J d >= 0 exactly by active-set enumeration (meant for a handful of
/// variables and constraints), then backtracks until the trial point is feasible and passes an
/// Armijo test on f. B starts at `b0` and follows damped BFGS updates of the Lagrangian.
SqpResult sqp_minimize(const SmoothObjective& f, const ConstraintSet& c, Eigen::VectorXd x0,
                       const Eigen::MatrixXd& b0, const SqpOptions& opt = {});

/// Exact solution of min g'd + d'Bd/2 s.t. a d >= b for positive definite B.
/// Returns false when no feasible point exists. `lambda` receives the multipliers.
bool solve_small_qp(const Eigen::MatrixXd& b, const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                    const Eigen::VectorXd& rhs, Eigen::VectorXd& d, Eigen::VectorXd& lambda);

}  // namespace rvkit
