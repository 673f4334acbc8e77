#include "rvkit/models/har.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rvkit/common/errors.hpp"
#include "rvkit/models/diagnostics.hpp"

namespace rvkit {

HarDesign build_har_design(std::span<const double> y, ModelFamily family, std::span<const double> rq,
                           std::optional<double> rq_sqrt_mean) {
    if (!is_har_family(family)) throw std::invalid_argument("build_har_design: not a HAR family");
    if (y.size() < kHarMaxLag + 1) {
        throw InsufficientDataError("HAR design needs at least 23 observations (22 lags + 1 target), got " +
                                    std::to_string(y.size()));
    }
    const bool q = family == ModelFamily::harq;
    if (q && rq.size() != y.size()) throw std::invalid_argument("build_har_design: rq must align with y");

    HarDesign out;
    if (q) {
        if (rq_sqrt_mean) {
            out.rq_sqrt_mean = *rq_sqrt_mean;
        } else {
            double s = 0.0;
            for (double v : rq) {
                if (!(v >= 0.0)) throw std::invalid_argument("build_har_design: rq must be non-negative");
                s += std::sqrt(v);
            }
            out.rq_sqrt_mean = s / static_cast<double>(rq.size());
        }
    }
    const auto rows = static_cast<Eigen::Index>(y.size() - kHarMaxLag);
    out.x.resize(rows, q ? 5 : 4);
    out.target.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = static_cast<std::size_t>(r) + kHarMaxLag;
        double w = 0.0;
        for (std::size_t i = 2; i <= 5; ++i) w += y[t - i];
        double m = 0.0;
        for (std::size_t i = 6; i <= 22; ++i) m += y[t - i];
        out.x(r, 0) = 1.0;
        out.x(r, 1) = y[t - 1];
        out.x(r, 2) = w / 4.0;
        out.x(r, 3) = m / 16.0;
        if (q) out.x(r, 4) = (std::sqrt(rq[t - 1]) - out.rq_sqrt_mean) * y[t - 1];
        out.target(r) = y[t];
    }
    return out;
}

int newey_west_lags(std::size_t t) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(t) / 100.0, 2.0 / 9.0)));
}

Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& x, const Eigen::VectorXd& e, int lags) {
    if (lags < 0) throw std::invalid_argument("newey_west_cov: lags must be >= 0");
    if (x.rows() != e.size()) throw std::invalid_argument("newey_west_cov: size mismatch");
    const Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) throw NumericalError("newey_west_cov: X'X is singular");
    const Eigen::MatrixXd inv = lu.inverse();

    const Eigen::MatrixXd scores = x.array().colwise() * e.array();
    Eigen::MatrixXd s = scores.transpose() * scores;
    const Eigen::Index n = scores.rows();
    for (int l = 1; l <= lags && l < n; ++l) {
        const double w = 1.0 - static_cast<double>(l) / static_cast<double>(lags + 1);
        const Eigen::MatrixXd g = scores.bottomRows(n - l).transpose() * scores.topRows(n - l);
        s += w * (g + g.transpose());
    }
    Eigen::MatrixXd v = inv * s * inv;
    return (v + v.transpose()) / 2.0;
}

ModelFit fit_har(const ModelData& data, ModelFamily family, const std::string& measure) {
    if (data.y.size() < kMinEstimationObs) {
        throw InsufficientDataError("estimation requires at least " + std::to_string(kMinEstimationObs) +
                                    " observations, got " + std::to_string(data.y.size()));
    }
    const auto design = build_har_design(data.y, family, data.rq);
    const Eigen::MatrixXd& x = design.x;
    const Eigen::VectorXd& y = design.target;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < x.cols()) throw NumericalError("fit_har: design matrix is rank deficient");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd fitted = x * beta;
    const Eigen::VectorXd e = y - fitted;

    ModelFit fit;
    fit.spec = {family, measure};
    fit.param_names = {"omega", "alpha_d", "alpha_w", "alpha_m"};
    if (family == ModelFamily::harq) fit.param_names.emplace_back("alpha_q");
    fit.params = beta;
    fit.pinned.assign(static_cast<std::size_t>(beta.size()), false);
    fit.n_obs = data.y.size();
    fit.hac_lags = newey_west_lags(static_cast<std::size_t>(x.rows()));
    fit.covariance = newey_west_cov(x, e, fit.hac_lags);
    fit.std_errors = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    fit.z_stats = beta.cwiseQuotient(fit.std_errors);
    fit.p_values.resize(beta.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i) fit.p_values(i) = normal_two_sided_p(fit.z_stats(i));

    const double tss = (y.array() - y.mean()).square().sum();
    fit.r2 = tss > 0.0 ? 1.0 - e.squaredNorm() / tss : 1.0;
    fit.residuals.assign(e.data(), e.data() + e.size());
    fit.fitted.assign(fitted.data(), fitted.data() + fitted.size());
    fit.fitted_offset = kHarMaxLag;
    fit.diagnostics = diagnostics(fit.residuals);
    fit.rq_sqrt_mean = design.rq_sqrt_mean;
    double s = 0.0;
    for (double v : data.y) s += v;
    fit.y_mean = s / static_cast<double>(data.y.size());
    return fit;
}

}  // namespace rvkit
